#include "thinmem/rows.hpp"

namespace thinmem {

BandedMatrix make_shifted_system(const RadialOperator& op, double shift, double scale) {
    const int n = op.size();
    int kl = 0, ku = 0;
    for (int i = 0; i < n; ++i) {
        const OperatorRow& r = op.rows[i];
        for (int k = 0; k < 5; ++k) {
            if (r.c[k] == 0.0) continue;
            const int j = r.j0 + k;
            kl = std::max(kl, i - j);
            ku = std::max(ku, j - i);
        }
    }
    BandedMatrix m(n, std::max(kl, 1), std::max(ku, 1));
    for (int i = 0; i < n; ++i) {
        const OperatorRow& r = op.rows[i];
        if (r.kind == RowKind::Interior) {
            m.add(i, i, shift);
            for (int k = 0; k < 5; ++k)
                if (r.c[k] != 0.0) m.add(i, r.j0 + k, -scale * r.c[k]);
        } else {
            for (int k = 0; k < 5; ++k)
                if (r.c[k] != 0.0) m.add(i, r.j0 + k, r.c[k]);
        }
    }
    return m;
}

std::vector<double> solve_shifted(const RadialOperator& op, double lambda,
                                  const std::vector<double>& g) {
    if (static_cast<int>(g.size()) != op.size())
        throw MismatchError("solve_shifted: rhs size mismatch");
    BandedMatrix m = make_shifted_system(op, lambda, 1.0);
    m.factorize();
    std::vector<double> rhs(g.size(), 0.0);
    for (int i = 0; i < op.size(); ++i)
        if (op.rows[i].kind == RowKind::Interior) rhs[i] = g[i];
    m.solve(rhs);
    return rhs;
}

}  // namespace thinmem
