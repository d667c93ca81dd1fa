#pragma once

#include <array>
#include <vector>

#include "thinmem/banded.hpp"
#include "thinmem/common.hpp"

namespace thinmem {

// One row of a discretized radial operator: a 5-entry stencil window starting
// at column j0.  Interior rows carry the differential expression; Condition
// rows carry a boundary or transmission constraint written as row.c * f = 0.
enum class RowKind { Interior, Condition };

struct OperatorRow {
    RowKind kind = RowKind::Interior;
    int j0 = 0;
    std::array<double, 5> c{0, 0, 0, 0, 0};
};

// A one-dimensional two-sided radial operator in row form.  The same row
// layout serves every per-mode system in the project: two tridiagonal blocks
// coupled through two transmission rows, plus two outer Neumann rows.
struct RadialOperator {
    std::vector<OperatorRow> rows;

    int size() const { return static_cast<int>(rows.size()); }

    double apply_row(int i, const std::vector<double>& f) const {
        const OperatorRow& r = rows[i];
        double s = 0.0;
        for (int k = 0; k < 5; ++k) {
            int j = r.j0 + k;
            if (r.c[k] != 0.0) s += r.c[k] * f[j];
        }
        return s;
    }

    // Interior rows: operator action; condition rows: constraint residual.
    std::vector<double> apply(const std::vector<double>& f) const {
        std::vector<double> out(rows.size());
        for (int i = 0; i < size(); ++i) out[i] = apply_row(i, f);
        return out;
    }

    double max_condition_residual(const std::vector<double>& f) const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i)
            if (rows[i].kind == RowKind::Condition)
                m = std::max(m, std::abs(apply_row(i, f)));
        return m;
    }
};

// Assembles the bordered-banded matrix for (shift*I - scale*L) with condition
// rows inserted verbatim; shift = lambda for resolvents, shift = 1 and
// scale = dt for implicit time steps.
BandedMatrix make_shifted_system(const RadialOperator& op, double shift, double scale);

// Solves (lambda - L) f = g with homogeneous condition rows.
std::vector<double> solve_shifted(const RadialOperator& op, double lambda,
                                  const std::vector<double>& g);

}  // namespace thinmem
