#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cvsense/gkp.hpp"

using namespace cvsense;

TEST_SUITE_BEGIN("gkp");

TEST_CASE("modulo reduction values") {
    CHECK(modulo_reduce(0.0, kGkpPeriod) == 0.0);
    CHECK(modulo_reduce(kGkpPeriod, kGkpPeriod) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(modulo_reduce(1.3, kGkpPeriod) == doctest::Approx(-1.2066282746310002).epsilon(1e-12));
    CHECK_THROWS_AS(modulo_reduce(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("modulo reduction is exactly idempotent and periodic") {
    RngStream rng(5, 1);
    for (int i = 0; i < 2000; ++i) {
        double z = (rng.uniform() - 0.5) * 40.0;
        double r = modulo_reduce(z, kGkpPeriod);
        CHECK(modulo_reduce(r, kGkpPeriod) == r);  // exact
        CHECK(std::abs(r) <= 0.5 * kGkpPeriod);
        int k = static_cast<int>(rng.uniform() * 7) - 3;
        CHECK(modulo_reduce(z + k * kGkpPeriod, kGkpPeriod) == doctest::Approx(r).epsilon(1e-12));
    }
    // half-period ties
    for (double m : {1.5, 2.5, -0.5, -3.5}) {
        double r = modulo_reduce(m * kGkpPeriod, kGkpPeriod);
        CHECK(std::abs(r) == doctest::Approx(0.5 * kGkpPeriod));
        CHECK(modulo_reduce(r, kGkpPeriod) == r);
    }
}

TEST_CASE("grid measurement of both quadratures") {
    RngStream rng(9, 2);
    GkpParams ideal{0.0};
    auto [q, p] = measure_both_quadratures(0.1, -0.2, ideal, rng);
    CHECK(q == doctest::Approx(0.1));
    CHECK(p == doctest::Approx(-0.2));

    auto [qw, pw] = measure_both_quadratures(kGkpPeriod + 0.1, 0.0, ideal, rng);
    CHECK(qw == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(pw == doctest::Approx(0.0));

    GkpParams finite{std::sqrt(0.02)};  // peak variance 0.01
    long n = 100000;
    double s2 = 0.0;
    for (long i = 0; i < n; ++i) {
        auto [mq, mp] = measure_both_quadratures(0.0, 0.0, finite, rng);
        CHECK(std::abs(mq) <= 0.5 * kGkpPeriod);
        CHECK(std::abs(mp) <= 0.5 * kGkpPeriod);
        s2 += mq * mq;
    }
    CHECK(s2 / n == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("grid quadrature sampling") {
    // wide peaks: envelope keeps all mass on the central peak
    RngStream rng(11, 0);
    GkpParams wide{2.0};
    long n = 200000;
    double s2 = 0.0;
    for (long i = 0; i < n; ++i) {
        double x = sample_grid_quadrature(wide, rng);
        s2 += x * x;
    }
    CHECK(s2 / n == doctest::Approx(2.0).epsilon(0.02));  // peak variance only

    // moderate squeezing: total variance tracks the envelope, 1/(2 delta^2)
    GkpParams params{std::sqrt(1.0 / 32.0)};
    RngStream r2(11, 1);
    n = 1000000;
    s2 = 0.0;
    for (long i = 0; i < n; ++i) {
        double x = sample_grid_quadrature(params, r2);
        s2 += x * x;
    }
    CHECK(s2 / n == doctest::Approx(16.0).epsilon(0.03));

    RngStream a(21, 4), b(21, 4);
    for (int i = 0; i < 32; ++i)
        CHECK(sample_grid_quadrature(params, a) == sample_grid_quadrature(params, b));

    CHECK_THROWS_AS(sample_grid_quadrature(GkpParams{0.0}, rng), std::invalid_argument);
}

TEST_CASE("pdf moments") {
    PdfGrid g = PdfGrid::gaussian(0.0, 0.7, 4096);
    auto [m, v] = pdf_moments(g);
    CHECK(std::abs(m) <= 1e-10);
    CHECK(v == doctest::Approx(0.49).epsilon(1e-3));

    // delta-like peak at a
    std::vector<double> w(513, 0.0);
    w[400] = 1.0;
    PdfGrid peak(-1.0, 1.0, w);
    CHECK(pdf_moments(peak).first == doctest::Approx(-1.0 + 400 * (2.0 / 512)).epsilon(1e-12));
}

TEST_CASE("fold_modulo") {
    // support already inside one period: unchanged variance
    PdfGrid narrow = PdfGrid::gaussian(0.0, kGkpPeriod / 20.0, 2048);
    PdfGrid folded = fold_modulo(narrow, kGkpPeriod);
    CHECK(pdf_moments(folded).second ==
          doctest::Approx(pdf_moments(narrow).second).epsilon(1e-6));
    CHECK(std::abs(folded.total() - 1.0) <= 1e-6);

    // a displaced peak folds to the origin
    PdfGrid displaced = PdfGrid::gaussian(kGkpPeriod, 0.01, 2048);
    PdfGrid back = fold_modulo(displaced, kGkpPeriod);
    CHECK(std::abs(pdf_moments(back).first) <= 1e-6);

    // wide Gaussian: variance matches a sampling oracle
    PdfGrid wide = PdfGrid::gaussian(0.0, kGkpPeriod, 8192);
    PdfGrid wf = fold_modulo(wide, kGkpPeriod);
    RngStream rng(31, 2);
    long n = 1000000;
    double s2 = 0.0;
    for (long i = 0; i < n; ++i) {
        double r = modulo_reduce(rng.gaussian(kGkpPeriod), kGkpPeriod);
        s2 += r * r;
    }
    CHECK(pdf_moments(wf).second == doctest::Approx(s2 / n).epsilon(0.01));

    // resolution guard
    PdfGrid coarse(-10.0, 10.0, std::vector<double>(64, 1.0));
    CHECK_THROWS_AS(fold_modulo(coarse, kGkpPeriod), std::invalid_argument);
}

TEST_CASE("pdf grid validation and serialization") {
    std::vector<double> neg = {0.1, -0.5, 0.1};
    CHECK_THROWS_AS(PdfGrid(-1.0, 1.0, neg), std::invalid_argument);
    CHECK_THROWS_AS(PdfGrid(1.0, -1.0, std::vector<double>{0.1, 0.1}), std::invalid_argument);

    PdfGrid g = PdfGrid::gaussian(0.0, 1.0, 64);
    CHECK(g.total() == doctest::Approx(1.0).epsilon(1e-12));
    std::ostringstream out;
    g.write_csv(out);
    CHECK(out.str().substr(0, 10) == "x,density\n");
}

TEST_SUITE_END();
