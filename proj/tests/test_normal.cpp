#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "adjalpha/errors.hpp"
#include "adjalpha/normal.hpp"

using namespace adjalpha;

TEST_CASE("normal cdf reference values") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-13));
    CHECK(norm_cdf(8.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm_sf(1.2) == doctest::Approx(norm_cdf(-1.2)).epsilon(1e-14));
}

TEST_CASE("normal pdf") {
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(norm_pdf(2.0) == doctest::Approx(norm_pdf(-2.0)).epsilon(1e-15));
}

TEST_CASE("quantile matches known points") {
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(norm_quantile(0.0199) == doctest::Approx(-2.0558186466124035).epsilon(1e-12));
}

TEST_CASE("quantile/cdf round trip") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(1e-10, 1.0 - 1e-10);
    for (int i = 0; i < 2000; ++i) {
        const double p = u(gen);
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    for (double x : {-7.0, -3.0, -0.4, 0.0, 1.3, 5.5}) {
        CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("quantile saturates at the endpoints") {
    CHECK(norm_quantile(0.0) == -std::numeric_limits<double>::infinity());
    CHECK(norm_quantile(1.0) == std::numeric_limits<double>::infinity());
}
