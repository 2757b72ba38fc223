#include <doctest.h>

#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include "mginf/dist.hpp"
#include "mginf/errors.hpp"
#include "mginf/sim.hpp"

using namespace mginf;

namespace {

std::vector<ServiceModel> catalog() {
    return {
        ServiceModel::exponential(1.0),
        ServiceModel::hyperexponential({0.5, 0.5}, {1.0, 2.0}),
        ServiceModel::erlang(2, 3.0),
        ServiceModel::lomax(3.0, 1.0),
        ServiceModel::weibull_heavy(0.5, 1.0),
    };
}

}  // namespace

TEST_CASE("survival function values") {
    CHECK(sf(ServiceModel::exponential(1.0), 0.0) == 1.0);
    CHECK(sf(ServiceModel::lomax(3.0, 1.0), 1.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(sf(ServiceModel::exponential(2.0), 1.0) == doctest::Approx(0.1353352832366127).epsilon(1e-14));
    // Erlang(2,3): e^{-3x}(1 + 3x)
    CHECK(sf(ServiceModel::erlang(2, 3.0), 0.5) == doctest::Approx(std::exp(-1.5) * 2.5).epsilon(1e-14));
    CHECK_THROWS_AS(sf(ServiceModel::exponential(1.0), -1.0), DomainError);
}

TEST_CASE("survival is monotone with sf(0) = 1 across the catalog") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (const auto& m : catalog()) {
        CAPTURE(to_string(m));
        CHECK(sf(m, 0.0) == doctest::Approx(1.0));
        for (int i = 0; i < 200; ++i) {
            double a = u(rng), b = u(rng);
            if (a > b) {
                std::swap(a, b);
            }
            CHECK(sf(m, a) >= sf(m, b));
        }
        // log_sf agrees with log(sf) where sf is representable.
        for (double x : {0.0, 0.3, 2.0, 7.5}) {
            CHECK(log_sf(m, x) == doctest::Approx(std::log(sf(m, x))).epsilon(1e-12));
        }
    }
}

TEST_CASE("means in closed form") {
    CHECK(mean(ServiceModel::exponential(1.0)) == 1.0);
    CHECK(mean(ServiceModel::lomax(3.0, 1.0)) == doctest::Approx(0.5));
    CHECK(mean(ServiceModel::hyperexponential({0.5, 0.5}, {1.0, 2.0})) == doctest::Approx(0.75));
    CHECK(mean(ServiceModel::erlang(2, 3.0)) == doctest::Approx(2.0 / 3.0));
    CHECK(mean(ServiceModel::weibull_heavy(0.5, 1.0)) == doctest::Approx(2.0));  // Gamma(3)
    CHECK_THROWS_AS(mean(ServiceModel::lomax(1.0, 1.0)), InfiniteMeanError);
    CHECK_THROWS_AS(mean(ServiceModel::lomax(0.7, 2.0)), InfiniteMeanError);
}

TEST_CASE("tail integral closed forms") {
    CHECK(tail_integral(ServiceModel::exponential(1.0), 0.0) == doctest::Approx(1.0));
    CHECK(tail_integral(ServiceModel::lomax(3.0, 1.0), 1.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(tail_integral(ServiceModel::exponential(1.0), 3.0) == doctest::Approx(0.049787068367863944).epsilon(1e-14));
    CHECK_THROWS_AS(tail_integral(ServiceModel::lomax(1.0, 1.0), 2.0), InfiniteMeanError);
}

TEST_CASE("tail integral: closed form agrees with quadrature, equals the mean at 0") {
    for (const auto& m : catalog()) {
        CAPTURE(to_string(m));
        CHECK(std::abs(tail_integral(m, 0.0) - mean(m)) < 1e-10);
        for (double t : {0.0, 0.1, 1.0, 4.0, 12.0}) {
            CHECK(std::abs(tail_integral(m, t) - tail_integral_quadrature(m, t)) < 1e-10);
        }
    }
}

TEST_CASE("d/dt tail_integral = -sf by finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    const double step = 1e-5;
    for (const auto& m : catalog()) {
        CAPTURE(to_string(m));
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng);
            const double fd = (tail_integral(m, t + step) - tail_integral(m, t - step)) / (2 * step);
            CHECK(std::abs(fd + sf(m, t)) / sf(m, t) < 1e-3);
        }
    }
}

TEST_CASE("inverse-CDF sampling") {
    CHECK(sample_from_uniform(ServiceModel::exponential(1.0), 0.5) == doctest::Approx(0.6931471805599453));
    CHECK(sample_from_uniform(ServiceModel::lomax(3.0, 1.0), 0.875) == doctest::Approx(1.0).epsilon(1e-14));
    // Inverse property: cdf(sample(u)) = u.
    for (const auto& m : catalog()) {
        for (double u : {0.01, 0.3, 0.5, 0.77, 0.999}) {
            CHECK(cdf(m, sample_from_uniform(m, u)) == doctest::Approx(u).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(sample_from_uniform(ServiceModel::exponential(1.0), 1.0), DomainError);
}

TEST_CASE("sampling: Monte Carlo mean and Kolmogorov-Smirnov against B") {
    const std::size_t n = 100000;
    for (const auto& m : catalog()) {
        CAPTURE(to_string(m));
        Engine rng(2024);
        std::vector<double> xs(n);
        double s = 0.0, s2 = 0.0;
        for (auto& x : xs) {
            x = sample(m, rng);
            CHECK_FALSE(x < 0.0);
            s += x;
            s2 += x * x;
        }
        const double avg = s / n;
        const double se = std::sqrt((s2 / n - avg * avg) / n);
        CHECK(std::abs(avg - mean(m)) < 3.0 * se);
        const double d = ks_statistic(xs, [&m](double x) { return cdf(m, x); });
        // Critical value of the KS statistic at significance 0.001.
        CHECK(d < 1.95 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("sampling is deterministic given the seed") {
    const auto m = ServiceModel::hyperexponential({0.2, 0.8}, {0.5, 4.0});
    Engine a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample(m, a) == sample(m, b));
    }
}

TEST_CASE("tail classification") {
    auto light = classify_tail(ServiceModel::exponential(2.0));
    REQUIRE(std::holds_alternative<LightTail>(light));
    CHECK(std::get<LightTail>(light).cramer_abscissa == 2.0);
    CHECK(std::get<LightTail>(classify_tail(ServiceModel::hyperexponential({0.5, 0.5}, {1.0, 2.0}))).cramer_abscissa ==
          1.0);
    CHECK(std::get<LightTail>(classify_tail(ServiceModel::erlang(2, 3.0))).cramer_abscissa == 3.0);

    const auto rv = classify_tail(ServiceModel::lomax(3.0, 1.0));
    REQUIRE(std::holds_alternative<RegularlyVaryingTail>(rv));
    const auto& r = std::get<RegularlyVaryingTail>(rv);
    CHECK(r.alpha == 3.0);
    // sf(x) = x^-alpha L(x) exactly.
    const auto lomax = ServiceModel::lomax(3.0, 2.5);
    const auto& r2 = std::get<RegularlyVaryingTail>(classify_tail(lomax));
    for (double x : {0.5, 3.0, 40.0, 1e4}) {
        CHECK(std::pow(x, -3.0) * r2.slowly_varying(x) == doctest::Approx(sf(lomax, x)).epsilon(1e-13));
    }

    CHECK(std::holds_alternative<SubexponentialOtherTail>(classify_tail(ServiceModel::weibull_heavy(0.5, 1.0))));
}

TEST_CASE("classification consistency") {
    for (const auto& m : catalog()) {
        const auto tail = classify_tail(m);
        if (const auto* l = std::get_if<LightTail>(&tail)) {
            CHECK(std::isfinite(exp_moment(m, l->cramer_abscissa / 2.0)));
        } else if (const auto* r = std::get_if<RegularlyVaryingTail>(&tail)) {
            for (double x : {1e2, 1e3, 1e4}) {
                const double ratio = sf(m, 2 * x) / sf(m, x);
                CHECK(std::abs(ratio / std::pow(2.0, -r->alpha) - 1.0) < 0.05);
            }
        }
    }
}

TEST_CASE("exponential moments") {
    CHECK(exp_moment(ServiceModel::exponential(1.0), 0.0) == 1.0);
    CHECK(exp_moment(ServiceModel::exponential(2.0), 1.0) == doctest::Approx(2.0));
    CHECK(std::isinf(exp_moment(ServiceModel::lomax(3.0, 1.0), 0.1)));
    CHECK(std::isinf(exp_moment(ServiceModel::weibull_heavy(0.5, 1.0), 0.1)));
    CHECK(std::isinf(exp_moment(ServiceModel::exponential(1.0), 1.0)));
    CHECK(exp_moment(ServiceModel::erlang(2, 3.0), 1.0) == doctest::Approx(2.25));
    // s < 0 goes through quadrature; compare with a trapezoid sum of e^{sx} pdf.
    const auto lomax = ServiceModel::lomax(3.0, 1.0);
    double direct = 0.0;
    const double h = 1e-3;
    for (int i = 0; i < 200000; ++i) {
        const double x0 = i * h, x1 = x0 + h;
        direct += 0.5 * h * (std::exp(-x0) * pdf(lomax, x0) + std::exp(-x1) * pdf(lomax, x1));
    }
    CHECK(exp_moment(lomax, -1.0) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("distribution spec parsing") {
    CHECK(std::holds_alternative<Exponential>(parse_model("exp:rate=1.0").variant()));
    const auto h = parse_model("hyperexp:w=0.5,0.5;rates=1,2");
    REQUIRE(h.is<HyperExponential>());
    CHECK(std::get<HyperExponential>(h.variant()).rates == std::vector<double>{1.0, 2.0});
    const auto e = parse_model("erlang:k=2,rate=3");
    CHECK(std::get<Erlang>(e.variant()).shape == 2);
    CHECK(std::get<Lomax>(parse_model("lomax:alpha=3,scale=1").variant()).alpha == 3.0);
    CHECK(std::get<WeibullHeavy>(parse_model("weibull:shape=0.5,scale=1").variant()).shape == 0.5);

    for (const auto& m : catalog()) {
        CHECK(to_string(parse_model(to_string(m))) == to_string(m));
    }

    CHECK_THROWS_AS(parse_model("exp"), ConfigError);
    CHECK_THROWS_AS(parse_model("exp:rate=-1"), ConfigError);
    CHECK_THROWS_AS(parse_model("exp:rate=abc"), ConfigError);
    CHECK_THROWS_AS(parse_model("exp:rate=1,shape=2"), ConfigError);
    CHECK_THROWS_AS(parse_model("gamma:k=1"), ConfigError);
    CHECK_THROWS_AS(parse_model("hyperexp:w=0.5,0.4;rates=1,2"), ConfigError);
    CHECK_THROWS_AS(parse_model("hyperexp:w=0.5,0.5;rates=1"), ConfigError);
    CHECK_THROWS_AS(parse_model("erlang:k=2.5,rate=1"), ConfigError);
    CHECK_THROWS_AS(parse_model("weibull:shape=1.5,scale=1"), ConfigError);
    CHECK_THROWS_AS(parse_model("lomax:alpha=3"), ConfigError);
}
