#include "thinmem/banded.hpp"

#include <algorithm>
#include <cmath>

namespace thinmem {

// Band LU with partial pivoting, following the classical GBTRF layout: the
// factor U occupies rows 0..kl+ku of the storage, L multipliers the last kl
// rows.  Pivoting stays within the band because only kl rows below the
// diagonal can be nonzero.
void BandedMatrix::factorize() {
    const int kv = kl_ + ku_;  // rows of fill above the diagonal after pivoting
    auto at = [&](int i, int j) -> double& {
        return a_[static_cast<std::size_t>(j) * ldab_ + (kv + i - j)];
    };

    for (int k = 0; k < n_; ++k) {
        const int lm = std::min(kl_, n_ - 1 - k);  // active subdiagonal length
        int p = k;
        double pmax = std::abs(at(k, k));
        for (int i = k + 1; i <= k + lm; ++i) {
            double v = std::abs(at(i, k));
            if (v > pmax) {
                pmax = v;
                p = i;
            }
        }
        piv_[k] = p;
        if (pmax == 0.0 || !std::isfinite(pmax))
            throw InternalError("BandedMatrix::factorize: singular pivot at column " +
                                std::to_string(k));
        const int jmax = std::min(n_ - 1, k + kv);
        if (p != k)
            for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
        for (int i = k + 1; i <= k + lm; ++i) {
            const double m = at(i, k) / at(k, k);
            at(i, k) = m;
            for (int j = k + 1; j <= jmax; ++j) at(i, j) -= m * at(k, j);
        }
    }
    factorized_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
    if (!factorized_) throw InternalError("BandedMatrix::solve before factorize");
    if (static_cast<int>(b.size()) != n_) throw MismatchError("BandedMatrix::solve: bad rhs size");
    const int kv = kl_ + ku_;
    auto at = [&](int i, int j) -> double {
        return a_[static_cast<std::size_t>(j) * ldab_ + (kv + i - j)];
    };

    for (int k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        const int lm = std::min(kl_, n_ - 1 - k);
        for (int i = k + 1; i <= k + lm; ++i) b[i] -= at(i, k) * b[k];
    }
    for (int k = n_ - 1; k >= 0; --k) {
        const int jmax = std::min(n_ - 1, k + kv);
        double s = b[k];
        for (int j = k + 1; j <= jmax; ++j) s -= at(k, j) * b[j];
        b[k] = s / at(k, k);
    }
}

}  // namespace thinmem
