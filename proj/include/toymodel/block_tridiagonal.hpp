#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace toymodel {

/// Dense 2x2 real block, row-major.
struct Block2 {
    std::array<double, 4> a{};

    static constexpr Block2 identity() noexcept { return {{1.0, 0.0, 0.0, 1.0}}; }

    [[nodiscard]] constexpr double operator()(int r, int c) const noexcept { return a[2 * r + c]; }
    constexpr double& operator()(int r, int c) noexcept { return a[2 * r + c]; }

    [[nodiscard]] constexpr double det() const noexcept { return a[0] * a[3] - a[1] * a[2]; }
    [[nodiscard]] double max_abs() const noexcept;

    Block2& operator+=(const Block2& o) noexcept
    {
        for (int k = 0; k < 4; ++k) a[k] += o.a[k];
        return *this;
    }
    friend Block2 operator+(Block2 l, const Block2& r) noexcept { return l += r; }
    friend Block2 operator-(const Block2& l, const Block2& r) noexcept
    {
        return {{l.a[0] - r.a[0], l.a[1] - r.a[1], l.a[2] - r.a[2], l.a[3] - r.a[3]}};
    }
    friend Block2 operator*(const Block2& l, const Block2& r) noexcept
    {
        return {{l.a[0] * r.a[0] + l.a[1] * r.a[2], l.a[0] * r.a[1] + l.a[1] * r.a[3],
                 l.a[2] * r.a[0] + l.a[3] * r.a[2], l.a[2] * r.a[1] + l.a[3] * r.a[3]}};
    }
    friend bool operator==(const Block2&, const Block2&) = default;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Block-tridiagonal matrix of 2x2 blocks, optionally with cyclic corner blocks.
///
/// Row j couples to columns j-1 (lower), j (diag) and j+1 (upper). When
/// periodic, lower(0) couples to the last block column and upper(n-1) to the
/// first. For periodic n <= 2 the off-diagonal slots alias the same block
/// column and their contributions add.
class BlockTridiagonal {
public:
    BlockTridiagonal(std::size_t n_blocks, bool periodic);
    static BlockTridiagonal identity(std::size_t n_blocks, bool periodic = false);

    [[nodiscard]] std::size_t blocks() const noexcept { return diag_.size(); }
    [[nodiscard]] std::size_t rows() const noexcept { return 2 * diag_.size(); }
    [[nodiscard]] bool periodic() const noexcept { return periodic_; }

    Block2& diag(std::size_t j) { return diag_[j]; }
    Block2& lower(std::size_t j) { return lower_[j]; }
    Block2& upper(std::size_t j) { return upper_[j]; }
    [[nodiscard]] const Block2& diag(std::size_t j) const { return diag_[j]; }
    [[nodiscard]] const Block2& lower(std::size_t j) const { return lower_[j]; }
    [[nodiscard]] const Block2& upper(std::size_t j) const { return upper_[j]; }

    /// Column block index addressed by lower(j)/upper(j), or npos for a
    /// non-periodic boundary slot.
    [[nodiscard]] std::size_t lower_column(std::size_t j) const noexcept;
    [[nodiscard]] std::size_t upper_column(std::size_t j) const noexcept;

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    /// Row-major dense copy, rows() x rows().
    [[nodiscard]] std::vector<double> to_dense() const;

    /// Largest absolute entry (entrywise max norm).
    [[nodiscard]] double max_abs() const noexcept;

private:
    std::vector<Block2> lower_;
    std::vector<Block2> diag_;
    std::vector<Block2> upper_;
    bool periodic_;
};

/// Direct solve by block LU (block Thomas). Cyclic systems with at least three
/// blocks use bordered elimination on the last block row and column; smaller
/// cyclic systems are solved densely.
///
/// Throws SingularMatrixError when a pivot block has |det| <= pivot_tol * max|entry|^2.
[[nodiscard]] std::vector<double> solve_block_tridiagonal(const BlockTridiagonal& matrix,
                                                          std::span<const double> rhs,
                                                          double pivot_tol = 1e-14);

}  // namespace toymodel
