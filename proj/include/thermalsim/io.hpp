// io.hpp
// Serialization: operators and states as {"dim", "re", "im"} JSON documents,
// and deterministic CSV emission (LF endings, '.' decimal, %.12g values).

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermalsim/core.hpp"
#include "thermalsim/quantum.hpp"

namespace thermalsim::io {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        json re_row = json::array(), im_row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            re_row.push_back(m(j, k).real());
            im_row.push_back(m(j, k).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("re") || !doc.contains("im"))
        throw ValidationError("matrix_from_json: expected {dim, re, im}");
    const auto dim = doc.at("dim").get<Eigen::Index>();
    if (dim < 1) throw ValidationError("matrix_from_json: dim must be positive");
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (!re.is_array() || !im.is_array() || re.size() != static_cast<std::size_t>(dim) ||
        im.size() != static_cast<std::size_t>(dim))
        throw ValidationError("matrix_from_json: re/im must be dim x dim arrays");
    Matrix m(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto& re_row = re.at(j);
        const auto& im_row = im.at(j);
        if (re_row.size() != static_cast<std::size_t>(dim) ||
            im_row.size() != static_cast<std::size_t>(dim))
            throw ValidationError("matrix_from_json: ragged row at index " + std::to_string(j));
        for (Eigen::Index k = 0; k < dim; ++k)
            m(j, k) = complexd(re_row.at(k).get<double>(), im_row.at(k).get<double>());
    }
    return m;
}

inline json to_json(const HermitianOperator& op) { return matrix_to_json(op.matrix()); }
inline json to_json(const DensityOperator& rho) { return matrix_to_json(rho.matrix()); }

inline HermitianOperator hermitian_from_json(const json& doc) {
    return HermitianOperator(matrix_from_json(doc));
}

// Densities are fully validated on load.
inline DensityOperator density_from_json(const json& doc) {
    return DensityOperator(matrix_from_json(doc));
}

inline json to_json(const PureState& psi) {
    json re = json::array(), im = json::array();
    for (Eigen::Index j = 0; j < psi.dim(); ++j) {
        re.push_back(psi.amplitudes()(j).real());
        im.push_back(psi.amplitudes()(j).imag());
    }
    return json{{"dim", psi.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline PureState pure_state_from_json(const json& doc) {
    if (!doc.contains("dim") || !doc.contains("re") || !doc.contains("im"))
        throw ValidationError("pure_state_from_json: expected {dim, re, im}");
    const auto dim = doc.at("dim").get<Eigen::Index>();
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (dim < 1 || re.size() != static_cast<std::size_t>(dim) ||
        im.size() != static_cast<std::size_t>(dim))
        throw ValidationError("pure_state_from_json: re/im must be length-dim arrays");
    Vector v(dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        v(j) = complexd(re.at(j).get<double>(), im.at(j).get<double>());
    return PureState(std::move(v));
}

// Formats a double with enough digits for regression use; stable bytes for
// identical inputs.
inline std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Deterministic CSV: header then rows, LF endings, no locale effects.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw NumericError("CsvWriter: cannot open " + path);
        out_ << header << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_value(values[i]);
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

}  // namespace thermalsim::io
