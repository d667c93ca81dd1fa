#pragma once

#include <vector>

#include "thinmem/common.hpp"

namespace thinmem {

// Banded matrix with kl sub- and ku super-diagonals, LU-factorized in place
// with partial pivoting (LAPACK-style band storage with kl fill rows).
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
          a_(static_cast<std::size_t>(ldab_) * n, 0.0), piv_(n, 0) {}

    int size() const { return n_; }

    void set(int i, int j, double v) { a_[index(i, j)] = v; }
    void add(int i, int j, double v) { a_[index(i, j)] += v; }
    double get(int i, int j) const { return a_[index(i, j)]; }

    bool in_band(int i, int j) const {
        return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
    }

    // Factorize in place; throws InternalError on a numerically singular pivot.
    void factorize();

    // Solve A x = b for one right-hand side (after factorize).
    void solve(std::vector<double>& b) const;

  private:
    std::size_t index(int i, int j) const {
        if (!in_band(i, j)) throw InternalError("BandedMatrix: entry outside band");
        // Column-major band storage: entry (i,j) at row kl+ku+i-j of column j.
        return static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j);
    }

    int n_, kl_, ku_, ldab_;
    std::vector<double> a_;
    std::vector<int> piv_;
    bool factorized_ = false;
};

}  // namespace thinmem
