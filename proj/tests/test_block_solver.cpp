#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toymodel/block_tridiagonal.hpp"

#include <cmath>
#include <random>
#include <utility>

using namespace toymodel;

namespace {

// Gaussian elimination with partial pivoting on a row-major dense copy.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
        }
        for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            for (std::size_t c = k; c < n; ++c) a[i * n + c] -= f * a[k * n + c];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
        x[k] = s / a[k * n + k];
    }
    return x;
}

Block2 random_block(std::mt19937_64& rng, double scale)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {{u(rng), u(rng), u(rng), u(rng)}};
}

BlockTridiagonal random_matrix(std::mt19937_64& rng, std::size_t n, bool periodic)
{
    BlockTridiagonal A(n, periodic);
    for (std::size_t j = 0; j < n; ++j) {
        A.diag(j) = random_block(rng, 1.0) + Block2{{4.0, 0.0, 0.0, 4.0}};
        if (j > 0 || periodic) A.lower(j) = random_block(rng, 1.0);
        if (j + 1 < n || periodic) A.upper(j) = random_block(rng, 1.0);
    }
    return A;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("matches a dense solve")
{
    std::mt19937_64 rng(42);
    for (bool periodic : {false, true}) {
        for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 32u}) {
            CAPTURE(periodic);
            CAPTURE(n);
            const auto A = random_matrix(rng, n, periodic);
            const auto b = random_vector(rng, 2 * n);
            const auto x = solve_block_tridiagonal(A, b);
            CHECK(max_diff(x, dense_solve(A.to_dense(), b)) < 1e-12);
            CHECK(max_diff(A.multiply(x), b) < 1e-12);
        }
    }
}

TEST_CASE("dense and banded products agree")
{
    std::mt19937_64 rng(8);
    for (bool periodic : {false, true}) {
        for (std::size_t n : {1u, 2u, 5u}) {
            const auto A = random_matrix(rng, n, periodic);
            const auto x = random_vector(rng, 2 * n);
            const auto dense = A.to_dense();
            std::vector<double> y(2 * n, 0.0);
            for (std::size_t r = 0; r < 2 * n; ++r) {
                for (std::size_t c = 0; c < 2 * n; ++c) y[r] += dense[r * 2 * n + c] * x[c];
            }
            CHECK(max_diff(A.multiply(x), y) < 1e-14);
        }
    }
}

TEST_CASE("periodic corners land in the right columns")
{
    BlockTridiagonal A = BlockTridiagonal::identity(4, true);
    A.lower(0) = Block2{{2.0, 0.0, 0.0, 2.0}};
    A.upper(3) = Block2{{3.0, 0.0, 0.0, 3.0}};
    CHECK(A.lower_column(0) == 3);
    CHECK(A.upper_column(3) == 0);
    const auto dense = A.to_dense();
    CHECK(dense[0 * 8 + 6] == 2.0);
    CHECK(dense[6 * 8 + 0] == 3.0);
}

TEST_CASE("two periodic blocks fold both couplings into one slot")
{
    BlockTridiagonal A(2, true);
    A.diag(0) = A.diag(1) = Block2{{5.0, 0.0, 0.0, 5.0}};
    for (std::size_t j = 0; j < 2; ++j) A.lower(j) = A.upper(j) = Block2{{1.0, 0.0, 0.0, 1.0}};
    const auto dense = A.to_dense();
    CHECK(dense[0 * 4 + 2] == 2.0);
    const std::vector<double> b{7.0, 7.0, 7.0, 7.0};
    const auto x = solve_block_tridiagonal(A, b);
    for (double v : x) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("block diagonal systems decouple")
{
    std::mt19937_64 rng(1);
    BlockTridiagonal A(6, false);
    for (std::size_t j = 0; j < 6; ++j) A.diag(j) = random_block(rng, 1.0) + Block2{{3.0, 0.0, 0.0, 3.0}};
    const auto b = random_vector(rng, 12);
    const auto x = solve_block_tridiagonal(A, b);
    for (std::size_t j = 0; j < 6; ++j) {
        const Block2& D = A.diag(j);
        const double det = D.det();
        const double x0 = (D(1, 1) * b[2 * j] - D(0, 1) * b[2 * j + 1]) / det;
        const double x1 = (-D(1, 0) * b[2 * j] + D(0, 0) * b[2 * j + 1]) / det;
        CHECK(x[2 * j] == doctest::Approx(x0).epsilon(1e-13));
        CHECK(x[2 * j + 1] == doctest::Approx(x1).epsilon(1e-13));
    }
}

TEST_CASE("identity solve returns the right-hand side")
{
    std::mt19937_64 rng(2);
    for (bool periodic : {false, true}) {
        const auto b = random_vector(rng, 10);
        CHECK(solve_block_tridiagonal(BlockTridiagonal::identity(5, periodic), b) == b);
    }
}

TEST_CASE("singular systems are reported")
{
    BlockTridiagonal A = BlockTridiagonal::identity(3, false);
    A.diag(1) = Block2{{1.0, 2.0, 2.0, 4.0}};
    const std::vector<double> b(6, 1.0);
    CHECK_THROWS_AS((void)solve_block_tridiagonal(A, b), SingularMatrixError);

    BlockTridiagonal P(2, true);
    CHECK_THROWS_AS((void)solve_block_tridiagonal(P, std::vector<double>(4, 1.0)), SingularMatrixError);
}

TEST_CASE("size mismatch is rejected")
{
    const auto A = BlockTridiagonal::identity(3, false);
    CHECK_THROWS_AS((void)solve_block_tridiagonal(A, std::vector<double>(5, 0.0)), std::invalid_argument);
}
