#include "thinmem/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace thinmem {

ReferenceGrid build_reference_grid(const Scenario& sc, int n_rad_lower, int n_rad_upper,
                                   int n_ang) {
    if (n_rad_lower < 4 || n_rad_upper < 4)
        throw ParameterError("build_reference_grid: radial counts must be >= 4");
    if (n_ang < 4 || n_ang % 2 != 0)
        throw ParameterError("build_reference_grid: n_ang must be even and >= 4");
    return ReferenceGrid{sc, n_rad_lower, n_rad_upper, n_ang};
}

void write_field_csv(const LayerField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("write_field_csv: cannot open " + path);
    out << "varrho,phi,side,value\n";
    char buf[96];
    const ReferenceGrid& g = f.grid;
    for (int i = 0; i < g.rows(); ++i) {
        const char* side = g.side_of_row(i) == Side::Lower ? "lower" : "upper";
        for (int j = 0; j < g.n_ang; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,%.17g\n", g.node(i), g.angle(j),
                          side, f.at(i, j));
            out << buf;
        }
    }
    if (!out) throw InternalError("write_field_csv: write failed for " + path);
}

LayerField read_field_csv(const std::string& path, const Scenario& sc) {
    std::ifstream in(path);
    if (!in) throw ParameterError("read_field_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "varrho,phi,side,value")
        throw ParameterError("read_field_csv: bad header in " + path);

    struct Row {
        double value;
        bool lower;
    };
    std::vector<Row> rows;
    int n_lower_cells = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string varrho_s, phi_s, side_s, value_s;
        if (!std::getline(ss, varrho_s, ',') || !std::getline(ss, phi_s, ',') ||
            !std::getline(ss, side_s, ',') || !std::getline(ss, value_s))
            throw ParameterError("read_field_csv: malformed row in " + path);
        bool lower = side_s == "lower";
        if (!lower && side_s != "upper")
            throw ParameterError("read_field_csv: unknown side '" + side_s + "'");
        rows.push_back({std::stod(value_s), lower});
        if (lower) ++n_lower_cells;
    }

    // Infer the angular count from the first radial block: rows are written
    // radial-major, so the first distinct varrho spans exactly n_ang lines.
    // Counting repeats of the first phi value is equivalent and simpler.
    std::ifstream in2(path);
    std::getline(in2, line);
    std::vector<double> phis;
    while (std::getline(in2, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string varrho_s, phi_s;
        std::getline(ss, varrho_s, ',');
        std::getline(ss, phi_s, ',');
        if (!phis.empty() && std::stod(phi_s) == phis.front()) break;
        phis.push_back(std::stod(phi_s));
    }
    const int n_ang = static_cast<int>(phis.size());
    if (n_ang == 0 || rows.size() % n_ang != 0 || n_lower_cells % n_ang != 0)
        throw ParameterError("read_field_csv: inconsistent row counts in " + path);

    const int n_rad_lower = n_lower_cells / n_ang;
    const int n_rad_upper = static_cast<int>(rows.size()) / n_ang - n_rad_lower;
    LayerField f(build_reference_grid(sc, n_rad_lower, n_rad_upper, n_ang));
    for (std::size_t k = 0; k < rows.size(); ++k) f.values[k] = rows[k].value;
    return f;
}

}  // namespace thinmem
