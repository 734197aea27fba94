#include "bivarfun/matrix_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bivarfun::io {

namespace {

void check_finite(const ComplexMatrix& m, const std::string& context) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                throw IoError(context + ": non-finite entry at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
            }
        }
    }
}

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

}  // namespace

ComplexMatrix read_matrix_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("matrix JSON parse failed: ") + e.what());
    }
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
        throw IoError("matrix JSON must be {\"rows\", \"cols\", \"entries\"}");
    }
    const auto rows = j["rows"].get<Eigen::Index>();
    const auto cols = j["cols"].get<Eigen::Index>();
    if (rows <= 0 || cols <= 0) throw IoError("matrix JSON: dimensions must be positive");
    const auto& entries = j["entries"];
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows * cols) {
        throw IoError("matrix JSON: entries length must equal rows*cols");
    }
    ComplexMatrix m(rows, cols);
    Eigen::Index idx = 0;
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2) {
            throw IoError("matrix JSON: each entry must be [re, im]");
        }
        const Eigen::Index i = idx / cols;
        const Eigen::Index jcol = idx % cols;
        m(i, jcol) = Complex(e[0].get<double>(), e[1].get<double>());
        ++idx;
    }
    check_finite(m, "matrix JSON");
    return m;
}

void write_matrix_json(const ComplexMatrix& m, std::ostream& out) {
    check_finite(m, "matrix JSON write");
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    nlohmann::json doc{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
    out << doc.dump(1, ' ') << '\n';
}

ComplexMatrix read_matrix_market(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0) {
        throw IoError("Matrix Market: missing %%MatrixMarket header");
    }
    std::istringstream hs(header);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || (format != "array" && format != "coordinate") ||
        (field != "complex" && field != "real" && field != "integer")) {
        throw IoError("Matrix Market: unsupported header '" + header + "'");
    }
    if (!symmetry.empty() && symmetry != "general") {
        throw IoError("Matrix Market: only 'general' symmetry is supported");
    }
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    Eigen::Index rows = 0, cols = 0;
    long long nnz = 0;
    if (format == "array") {
        if (!(sizes >> rows >> cols)) throw IoError("Matrix Market: bad size line");
    } else {
        if (!(sizes >> rows >> cols >> nnz)) throw IoError("Matrix Market: bad size line");
    }
    if (rows <= 0 || cols <= 0) throw IoError("Matrix Market: dimensions must be positive");

    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    const bool complex_field = (field == "complex");
    if (format == "array") {
        // Array format lists entries column-major.
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                double re = 0, im = 0;
                if (!(in >> re)) throw IoError("Matrix Market: truncated array data");
                if (complex_field && !(in >> im)) {
                    throw IoError("Matrix Market: truncated complex entry");
                }
                m(i, j) = Complex(re, im);
            }
        }
    } else {
        for (long long t = 0; t < nnz; ++t) {
            Eigen::Index i = 0, j = 0;
            double re = 0, im = 0;
            if (!(in >> i >> j >> re)) throw IoError("Matrix Market: truncated coordinate data");
            if (complex_field && !(in >> im)) {
                throw IoError("Matrix Market: truncated complex entry");
            }
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw IoError("Matrix Market: index out of range");
            }
            m(i - 1, j - 1) = Complex(re, im);
        }
    }
    check_finite(m, "Matrix Market");
    return m;
}

void write_matrix_market(const ComplexMatrix& m, std::ostream& out) {
    check_finite(m, "Matrix Market write");
    out << "%%MatrixMarket matrix array complex general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[64];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", m(i, j).real(), m(i, j).imag());
            out << buf;
        }
    }
}

ComplexMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    const std::string ext = lower_ext(path);
    bool market = (ext == "mtx" || ext == "mm");
    if (!market && ext != "json") {
        market = (in.peek() == '%');
    }
    return market ? read_matrix_market(in) : read_matrix_json(in);
}

void write_matrix(const ComplexMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open matrix file for writing: " + path);
    const std::string ext = lower_ext(path);
    if (ext == "mtx" || ext == "mm") {
        write_matrix_market(m, out);
    } else {
        write_matrix_json(m, out);
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace bivarfun::io
