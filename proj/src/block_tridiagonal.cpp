#include "toymodel/block_tridiagonal.hpp"

#include "toymodel/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace toymodel {

namespace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

Vec2 apply(const Block2& m, Vec2 v) noexcept
{
    return {m.a[0] * v.x + m.a[1] * v.y, m.a[2] * v.x + m.a[3] * v.y};
}

Vec2 operator-(Vec2 l, Vec2 r) noexcept { return {l.x - r.x, l.y - r.y}; }

Block2 checked_inverse(const Block2& m, double pivot_tol, std::size_t row)
{
    const double scale = m.max_abs();
    const double det = m.det();
    if (!(scale > 0.0) || !std::isfinite(det) || std::abs(det) <= pivot_tol * scale * scale) {
        throw SingularMatrixError("singular pivot block at block row " + std::to_string(row));
    }
    const double inv = 1.0 / det;
    return {{m.a[3] * inv, -m.a[1] * inv, -m.a[2] * inv, m.a[0] * inv}};
}

// Block LU of the non-cyclic tridiagonal part spanning block rows [0, m).
class BlockThomas {
public:
    BlockThomas(const BlockTridiagonal& A, std::size_t m, double pivot_tol)
        : A_(A), pivot_inv_(m), multiplier_(m)
    {
        Block2 pivot = A.diag(0);
        pivot_inv_[0] = checked_inverse(pivot, pivot_tol, 0);
        for (std::size_t i = 1; i < m; ++i) {
            multiplier_[i] = A.lower(i) * pivot_inv_[i - 1];
            pivot = A.diag(i) - multiplier_[i] * A.upper(i - 1);
            pivot_inv_[i] = checked_inverse(pivot, pivot_tol, i);
        }
    }

    void solve(std::vector<Vec2>& f) const
    {
        const std::size_t m = pivot_inv_.size();
        for (std::size_t i = 1; i < m; ++i) {
            f[i] = f[i] - apply(multiplier_[i], f[i - 1]);
        }
        f[m - 1] = apply(pivot_inv_[m - 1], f[m - 1]);
        for (std::size_t i = m - 1; i-- > 0;) {
            f[i] = apply(pivot_inv_[i], f[i] - apply(A_.upper(i), f[i + 1]));
        }
    }

private:
    const BlockTridiagonal& A_;
    std::vector<Block2> pivot_inv_;
    std::vector<Block2> multiplier_;
};

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, double pivot_tol)
{
    const std::size_t n = b.size();
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a[r * n + k]) > std::abs(a[p * n + k])) p = r;
        }
        if (!(std::abs(a[p * n + k]) > pivot_tol * scale)) {
            throw SingularMatrixError("singular matrix in dense fallback");
        }
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
            std::swap(b[k], b[p]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r * n + k] / a[k * n + k];
            for (std::size_t c = k; c < n; ++c) a[r * n + c] -= f * a[k * n + c];
            b[r] -= f * b[k];
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

std::vector<Vec2> to_blocks(std::span<const double> v)
{
    std::vector<Vec2> out(v.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {v[2 * i], v[2 * i + 1]};
    return out;
}

}  // namespace

double Block2::max_abs() const noexcept
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

BlockTridiagonal::BlockTridiagonal(std::size_t n_blocks, bool periodic)
    : lower_(n_blocks), diag_(n_blocks), upper_(n_blocks), periodic_(periodic)
{
    if (n_blocks == 0) {
        throw std::invalid_argument("block-tridiagonal matrix needs at least one block");
    }
}

BlockTridiagonal BlockTridiagonal::identity(std::size_t n_blocks, bool periodic)
{
    BlockTridiagonal m(n_blocks, periodic);
    for (auto& d : m.diag_) d = Block2::identity();
    return m;
}

std::size_t BlockTridiagonal::lower_column(std::size_t j) const noexcept
{
    return neighbor_index(blocks(), periodic_ ? Closure::Periodic : Closure::Dirichlet, j, -1);
}

std::size_t BlockTridiagonal::upper_column(std::size_t j) const noexcept
{
    return neighbor_index(blocks(), periodic_ ? Closure::Periodic : Closure::Dirichlet, j, +1);
}

std::vector<double> BlockTridiagonal::multiply(std::span<const double> x) const
{
    if (x.size() != rows()) {
        throw std::invalid_argument("dimension mismatch in block-tridiagonal multiply");
    }
    const auto xb = to_blocks(x);
    std::vector<double> y(rows());
    for (std::size_t j = 0; j < blocks(); ++j) {
        Vec2 acc = apply(diag_[j], xb[j]);
        if (const auto c = lower_column(j); c != npos) {
            const Vec2 t = apply(lower_[j], xb[c]);
            acc = {acc.x + t.x, acc.y + t.y};
        }
        if (const auto c = upper_column(j); c != npos) {
            const Vec2 t = apply(upper_[j], xb[c]);
            acc = {acc.x + t.x, acc.y + t.y};
        }
        y[2 * j] = acc.x;
        y[2 * j + 1] = acc.y;
    }
    return y;
}

std::vector<double> BlockTridiagonal::to_dense() const
{
    const std::size_t n = rows();
    std::vector<double> dense(n * n, 0.0);
    auto add = [&](std::size_t bj, std::size_t bc, const Block2& blk) {
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) dense[(2 * bj + r) * n + 2 * bc + c] += blk(r, c);
        }
    };
    for (std::size_t j = 0; j < blocks(); ++j) {
        add(j, j, diag_[j]);
        if (const auto c = lower_column(j); c != npos) add(j, c, lower_[j]);
        if (const auto c = upper_column(j); c != npos) add(j, c, upper_[j]);
    }
    return dense;
}

double BlockTridiagonal::max_abs() const noexcept
{
    double m = 0.0;
    for (std::size_t j = 0; j < blocks(); ++j) {
        m = std::max({m, diag_[j].max_abs(), lower_[j].max_abs(), upper_[j].max_abs()});
    }
    return m;
}

std::vector<double> solve_block_tridiagonal(const BlockTridiagonal& A, std::span<const double> rhs,
                                            double pivot_tol)
{
    if (rhs.size() != A.rows()) {
        throw std::invalid_argument("dimension mismatch in block-tridiagonal solve");
    }
    const std::size_t n = A.blocks();

    if (A.periodic() && n <= 2) {
        return solve_dense(A.to_dense(), std::vector<double>(rhs.begin(), rhs.end()), pivot_tol);
    }

    auto f = to_blocks(rhs);
    std::vector<double> x(A.rows());

    if (!A.periodic()) {
        BlockThomas(A, n, pivot_tol).solve(f);
    } else {
        // Bordered elimination: T y + B z = f_y, C y + D z = f_z with z the last block.
        const std::size_t m = n - 1;
        const BlockThomas T(A, m, pivot_tol);

        std::vector<Vec2> w(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(m));
        T.solve(w);

        // Two columns of T^{-1} B; B has nonzero blocks only in rows 0 and m-1.
        std::vector<Vec2> y0(m), y1(m);
        y0[0] = {A.lower(0)(0, 0), A.lower(0)(1, 0)};
        y1[0] = {A.lower(0)(0, 1), A.lower(0)(1, 1)};
        y0[m - 1].x += A.upper(m - 1)(0, 0);
        y0[m - 1].y += A.upper(m - 1)(1, 0);
        y1[m - 1].x += A.upper(m - 1)(0, 1);
        y1[m - 1].y += A.upper(m - 1)(1, 1);
        T.solve(y0);
        T.solve(y1);

        const Block2& c_first = A.upper(m);  // row m, column 0 (corner)
        const Block2& c_last = A.lower(m);   // row m, column m-1
        const Block2 y_first{{y0[0].x, y1[0].x, y0[0].y, y1[0].y}};
        const Block2 y_last{{y0[m - 1].x, y1[m - 1].x, y0[m - 1].y, y1[m - 1].y}};
        const Block2 schur = A.diag(m) - (c_first * y_first + c_last * y_last);
        const Vec2 cw_first = apply(c_first, w[0]);
        const Vec2 cw_last = apply(c_last, w[m - 1]);
        const Vec2 zrhs = {f[m].x - cw_first.x - cw_last.x, f[m].y - cw_first.y - cw_last.y};
        const Vec2 z = apply(checked_inverse(schur, pivot_tol, m), zrhs);

        for (std::size_t i = 0; i < m; ++i) {
            f[i] = {w[i].x - (y0[i].x * z.x + y1[i].x * z.y), w[i].y - (y0[i].y * z.x + y1[i].y * z.y)};
        }
        f[m] = z;
    }

    for (std::size_t i = 0; i < n; ++i) {
        x[2 * i] = f[i].x;
        x[2 * i + 1] = f[i].y;
    }
    return x;
}

}  // namespace toymodel
