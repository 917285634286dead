#include <doctest.h>

#include <cmath>
#include <random>

#include "labseg/sobel.hpp"
#include "oracles.hpp"

using namespace labseg;

namespace {

GrayMap random_gray(std::mt19937_64& gen, int w, int h, double scale = 100.0) {
    GrayMap g(w, h);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = oracle::uniform(gen) * scale;
    return g;
}

}  // namespace

TEST_CASE("convolve3x3 basics") {
    std::mt19937_64 gen(31);
    const GrayMap img = random_gray(gen, 9, 7);

    SUBCASE("identity kernel") {
        const Kernel3x3 id{0, 0, 0, 0, 1, 0, 0, 0, 0};
        const GrayMap out = convolve3x3(img, id);
        for (std::size_t i = 0; i < img.size(); ++i) CHECK(out[i] == img[i]);
    }

    SUBCASE("zero-sum kernel annihilates constants") {
        const GrayMap flat(6, 5, 3.25);
        const Kernel3x3 k{1, -2, 1, 0, 0, 0, -1, 3, -2};
        const GrayMap out = convolve3x3(flat, k);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.0));
    }

    SUBCASE("1x1 image with all-ones kernel") {
        const GrayMap one(1, 1, 4.5);
        const Kernel3x3 ones{1, 1, 1, 1, 1, 1, 1, 1, 1};
        CHECK(convolve3x3(one, ones)[0] == doctest::Approx(9 * 4.5));
    }

    SUBCASE("matches brute force exactly on random 7x7 images") {
        for (int trial = 0; trial < 50; ++trial) {
            const GrayMap small = random_gray(gen, 7, 7);
            Kernel3x3 k;
            for (double& v : k) v = (oracle::uniform(gen) - 0.5) * 4.0;
            const GrayMap fast = convolve3x3(small, k);
            const GrayMap ref = oracle::convolve3x3_ref(small, k);
            for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == ref[i]);
        }
    }

    SUBCASE("linearity") {
        const GrayMap a = random_gray(gen, 8, 8);
        const GrayMap b = random_gray(gen, 8, 8);
        const Kernel3x3 k{0.5, -1, 2, 0, 1, 0, -2, 1, -0.5};
        const double alpha = 1.7, beta = -0.6;
        GrayMap mix(8, 8);
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
        const GrayMap lhs = convolve3x3(mix, k);
        const GrayMap ca = convolve3x3(a, k);
        const GrayMap cb = convolve3x3(b, k);
        for (std::size_t i = 0; i < lhs.size(); ++i)
            CHECK(lhs[i] == doctest::Approx(alpha * ca[i] + beta * cb[i]).epsilon(1e-5));
    }
}

TEST_CASE("sobel_gradient basics") {
    SUBCASE("constant image has zero gradient") {
        const GrayMap flat(10, 6, 42.0);
        const SobelResult r = sobel_gradient(flat);
        for (std::size_t i = 0; i < flat.size(); ++i) {
            CHECK(r.gx[i] == 0.0);
            CHECK(r.gy[i] == 0.0);
            CHECK(r.mag[i] == 0.0);
        }
    }

    SUBCASE("vertical step has |gx| = 4 next to the edge") {
        GrayMap img(8, 6, 0.0);
        for (int y = 0; y < 6; ++y)
            for (int x = 4; x < 8; ++x) img.at(x, y) = 1.0;
        const SobelResult exact = sobel_gradient(img, Magnitude::Exact);
        const SobelResult man = sobel_gradient(img, Magnitude::Manhattan);
        for (int y = 1; y < 5; ++y) {
            for (int x : {3, 4}) {
                CHECK(std::abs(exact.gx.at(x, y)) == 4.0);
                CHECK(exact.gy.at(x, y) == 0.0);
                CHECK(exact.mag.at(x, y) == 4.0);
                CHECK(man.mag.at(x, y) == 4.0);
            }
            CHECK(exact.mag.at(1, y) == 0.0);
            CHECK(exact.mag.at(6, y) == 0.0);
        }
    }

    SUBCASE("magnitude bound: exact <= manhattan <= sqrt(2) * exact") {
        std::mt19937_64 gen(37);
        const GrayMap img = random_gray(gen, 16, 12);
        const SobelResult exact = sobel_gradient(img, Magnitude::Exact);
        const SobelResult man = sobel_gradient(img, Magnitude::Manhattan);
        for (std::size_t i = 0; i < img.size(); ++i) {
            CHECK(exact.mag[i] <= man.mag[i] + 1e-6);
            CHECK(man.mag[i] <= std::sqrt(2.0) * exact.mag[i] + 1e-6);
        }
    }

    SUBCASE("translation equivariance away from borders") {
        std::mt19937_64 gen(41);
        const GrayMap img = random_gray(gen, 12, 10);
        GrayMap shifted(12, 10);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 12; ++x)
                shifted.at(x, y) = img.at(std::max(0, x - 1), y);
        const SobelResult a = sobel_gradient(img);
        const SobelResult b = sobel_gradient(shifted);
        for (int y = 2; y < 8; ++y)
            for (int x = 3; x < 10; ++x) CHECK(b.mag.at(x, y) == a.mag.at(x - 1, y));
    }

    SUBCASE("thread count does not change results") {
        std::mt19937_64 gen(43);
        const GrayMap img = random_gray(gen, 64, 48);
        const SobelResult a = sobel_gradient(img, Magnitude::Exact, 1);
        const SobelResult b = sobel_gradient(img, Magnitude::Exact, 8);
        CHECK(a.mag.data == b.mag.data);
        CHECK(a.gx.data == b.gx.data);
        CHECK(a.gy.data == b.gy.data);
    }
}

TEST_CASE("lightness_of extracts L") {
    LabImage img(2, 1);
    img.at(0, 0) = {50, 10, -5};
    img.at(1, 0) = {100, 0, 0};
    const GrayMap g = lightness_of(img);
    CHECK(g.at(0, 0) == 50.0);
    CHECK(g.at(1, 0) == 100.0);
}
