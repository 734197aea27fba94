#include "bivarfun/report_json.hpp"

#include <ctime>
#include <fstream>
#include <iostream>

namespace bivarfun::report {

json to_json(const Config& cfg) {
    return json{{"tol_eig", cfg.tol_eig},
                {"tol_solve", cfg.tol_solve},
                {"tol_norm", cfg.tol_norm},
                {"tol_cert", cfg.tol_cert},
                {"diagonalizable_kappa_max", cfg.diagonalizable_kappa_max},
                {"kron_dim_cap", cfg.kron_dim_cap},
                {"numrange_angles", cfg.numrange_angles},
                {"certify_angles", cfg.certify_angles},
                {"margin_scale", cfg.margin_scale},
                {"probe_points", cfg.probe_points},
                {"probe_cap", cfg.probe_cap}};
}

json matrix_to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

json to_json(const fieldvals::Contour& g) {
    return json{{"kind", g.kind == fieldvals::Contour::Kind::Circle ? "circle" : "ellipse"},
                {"center", {g.center.real(), g.center.imag()}},
                {"semi_major", g.semi_major},
                {"semi_minor", g.semi_minor},
                {"rotation", g.rotation}};
}

fieldvals::Contour contour_from_json(const json& j) {
    fieldvals::Contour g;
    const std::string kind = j.at("kind").get<std::string>();
    g.kind = kind == "circle" ? fieldvals::Contour::Kind::Circle
                              : fieldvals::Contour::Kind::Ellipse;
    g.center = Complex(j.at("center")[0].get<double>(), j.at("center")[1].get<double>());
    g.semi_major = j.at("semi_major").get<double>();
    g.semi_minor = j.at("semi_minor").get<double>();
    g.rotation = j.value("rotation", 0.0);
    return g;
}

json to_json(const matfun::EvalMetadata& m) {
    return json{{"nodes_used", m.nodes_used},
                {"est_error", m.est_error},
                {"scale", m.scale},
                {"accuracy_warning", m.accuracy_warning},
                {"note", m.note}};
}

json to_json(const certify::CertificateReport& r) {
    return json{{"inequality_id", r.inequality_id},
                {"lhs", r.lhs},
                {"rhs_sup_sample", r.rhs_sup_sample},
                {"constant", r.constant},
                {"ratio", r.ratio},
                {"raw_ratio", r.raw_ratio},
                {"pass", r.pass},
                {"rhs_is_lower_bound", r.rhs_is_lower_bound},
                {"refined", r.refined},
                {"boundary_samples", r.boundary_samples},
                {"quadrature_nodes", r.quadrature_nodes},
                {"margins", r.margins},
                {"note", r.note}};
}

json to_json(const frechet::FrechetResult& r) {
    return json{{"norm", r.norm},
                {"bound", r.bound},
                {"ratio", r.ratio},
                {"sup_fprime", r.sup_fprime},
                {"sup_samples", r.sup_samples},
                {"meta", to_json(r.op.meta())}};
}

json to_json(const krylov::KrylovApproxResult& r) {
    json j{{"k_used", r.k_used},
           {"l_used", r.l_used},
           {"norm_x", r.x_kl.norm()},
           {"norm_y", r.y_kl.norm()},
           {"meta", to_json(r.meta)}};
    if (r.error_vs_exact) j["error_vs_exact"] = *r.error_vs_exact;
    if (r.apriori_bound) j["apriori_bound"] = *r.apriori_bound;
    return j;
}

std::string tsv_header() {
    return "case\tinequality\tlhs\trhs_sup\tconstant\tratio\traw_ratio\tpass\trefined\n";
}

std::string tsv_row(const std::string& case_id, const certify::CertificateReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%s\t%s\n",
                  case_id.c_str(), r.inequality_id.c_str(), r.lhs, r.rhs_sup_sample,
                  r.constant, r.ratio, r.raw_ratio, r.pass ? "pass" : "FAIL",
                  r.refined ? "yes" : "no");
    return buf;
}

json envelope(json body) {
    char stamp[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return json{{"schema", "bivarfun-report/1"},
                {"generated_at", stamp},
                {"body", std::move(body)}};
}

void write_report(const json& doc, const std::string& path) {
    if (path.empty()) {
        std::cout << doc.dump(1, ' ') << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << doc.dump(1, ' ') << '\n';
    if (!out) throw IoError("report write failed: " + path);
}

}  // namespace bivarfun::report
