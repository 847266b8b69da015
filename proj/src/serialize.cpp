#include "rfde/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfde {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string path_to_csv(const SampledPath& path) {
    std::ostringstream out;
    out << "t";
    for (int c = 0; c < path.dim(); ++c) out << ",x" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << format_double(path.grid().time(i));
        for (int c = 0; c < path.dim(); ++c) out << "," << format_double(path.value(i)[c]);
        out << "\n";
    }
    return out.str();
}

void write_path_csv(const SampledPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << path_to_csv(path);
}

SampledPath path_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("path csv: empty document");
    std::vector<double> times;
    std::vector<Vec> values;
    int dim = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("path csv: malformed number '" + cell + "'");
            }
        }
        if (row.size() < 2) throw std::runtime_error("path csv: malformed row");
        if (dim < 0) dim = static_cast<int>(row.size()) - 1;
        if (static_cast<int>(row.size()) - 1 != dim) throw std::runtime_error("path csv: ragged rows");
        times.push_back(row[0]);
        Vec v(dim);
        for (int c = 0; c < dim; ++c) v[c] = row[c + 1];
        values.push_back(std::move(v));
    }
    if (times.empty()) throw std::runtime_error("path csv: no rows");
    return SampledPath(Grid(std::move(times)), std::move(values));
}

SampledPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return path_from_csv(buf.str());
}

Json rough_path_to_json(const RoughPath& rp) {
    Json j;
    j["dimension"] = rp.dim();
    j["times"] = Json::array();
    for (double t : rp.grid().times()) j["times"].push_back(t);
    j["values"] = Json::array();
    for (std::size_t i = 0; i < rp.path().size(); ++i) {
        Json row = Json::array();
        for (int c = 0; c < rp.dim(); ++c) row.push_back(rp.path().value(i)[c]);
        j["values"].push_back(std::move(row));
    }
    j["cells"] = Json::array();
    for (std::size_t k = 0; k < rp.cell_count(); ++k) {
        Json cell = Json::array();
        const Mat& m = rp.cell(k);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) cell.push_back(m(r, c));
        j["cells"].push_back(std::move(cell));
    }
    return j;
}

RoughPath rough_path_from_json(const Json& j) {
    const int d = j.at("dimension").get<int>();
    std::vector<double> times = j.at("times").get<std::vector<double>>();
    std::vector<Vec> values;
    for (const auto& row : j.at("values")) {
        Vec v(d);
        int c = 0;
        for (const auto& x : row) v[c++] = x.get<double>();
        if (c != d) throw std::runtime_error("rough path: value width mismatch");
        values.push_back(std::move(v));
    }
    std::vector<Mat> cells;
    for (const auto& cell : j.at("cells")) {
        if (static_cast<int>(cell.size()) != d * d) throw std::runtime_error("rough path: cell size mismatch");
        Mat m(d, d);
        int idx = 0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = cell[idx++].get<double>();
        cells.push_back(std::move(m));
    }
    return RoughPath(SampledPath(Grid(std::move(times)), std::move(values)), std::move(cells));
}

void write_rough_path(const RoughPath& rp, const std::string& file) { write_json(rough_path_to_json(rp), file); }

RoughPath read_rough_path(const std::string& file) { return rough_path_from_json(read_json(file)); }

Json solution_report_to_json(const SolutionReport& report, const std::string& solution_csv) {
    Json j;
    j["solution_csv"] = solution_csv;
    j["partition"] = report.partition;
    j["gamma"] = report.gamma;
    j["gamma_halvings"] = report.gamma_halvings;
    j["apriori_norm"] = report.apriori_norm;
    j["residual"] = report.residual;
    Json pieces = Json::array();
    for (const auto& piece : report.pieces) {
        Json p;
        p["begin"] = piece.begin;
        p["end"] = piece.end;
        p["iterations"] = piece.iterations;
        p["delta"] = piece.delta;
        p["contraction_ratios"] = piece.contraction_ratios;
        pieces.push_back(std::move(p));
    }
    j["pieces"] = std::move(pieces);
    return j;
}

void write_json(const Json& j, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << j.dump(2) << "\n";
}

Json read_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    Json j;
    in >> j;
    return j;
}

}  // namespace rfde
