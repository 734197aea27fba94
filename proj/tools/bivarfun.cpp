// bivarfun: bivariate and multivariate matrix functions over numerical
// ranges, with contour-quadrature evaluation, Frechet derivatives, Krylov
// approximation, and empirical certification of the spectral-set bounds.
//
// Exit codes: 0 success; 2 certification red flag; 3 I/O error;
// 4 usage/expression/job parse error; 5 numeric or domain error;
// 1 unexpected internal error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bivarfun/certify.hpp"
#include "bivarfun/ensemble.hpp"
#include "bivarfun/frechet.hpp"
#include "bivarfun/krylov.hpp"
#include "bivarfun/matrix_io.hpp"
#include "bivarfun/report_json.hpp"

namespace {

using namespace bivarfun;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitRedFlag = 2;
constexpr int kExitIo = 3;
constexpr int kExitUsage = 4;
constexpr int kExitNumeric = 5;

struct ConfigCli {
    std::string file;
    Config cfg;
    // presence flags so file < flag precedence holds
    CLI::Option *o_tol_cert = nullptr, *o_tol_eig = nullptr, *o_tol_solve = nullptr,
                *o_tol_norm = nullptr, *o_angles = nullptr, *o_cert_angles = nullptr,
                *o_margin_scale = nullptr, *o_kron_cap = nullptr, *o_probe_points = nullptr;
    double tol_cert = 0, tol_eig = 0, tol_solve = 0, tol_norm = 0, margin_scale = 0;
    int angles = 0, cert_angles = 0, probe_points = 0;
    Eigen::Index kron_cap = 0;

    void attach(CLI::App& app) {
        app.add_option("--config", file, "key=value configuration file");
        o_tol_cert = app.add_option("--tol-cert", tol_cert, "certification slack");
        o_tol_eig = app.add_option("--tol-eig", tol_eig, "eigensolver residual target");
        o_tol_solve = app.add_option("--tol-solve", tol_solve, "linear solve residual target");
        o_tol_norm = app.add_option("--tol-norm", tol_norm, "spectral norm accuracy");
        o_angles = app.add_option("--angles", angles, "numerical range sweep angles");
        o_cert_angles = app.add_option("--cert-angles", cert_angles,
                                       "denser sweep used by certification");
        o_margin_scale = app.add_option("--margin-scale", margin_scale,
                                        "contour margin = scale*(1+diameter)");
        o_kron_cap = app.add_option("--kron-cap", kron_cap,
                                    "materialization cap for Kronecker operators");
        o_probe_points = app.add_option("--probe-points", probe_points,
                                        "analyticity probe points per contour");
    }

    Config resolve() const {
        Config c;
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw IoError("cannot open config file: " + file);
            std::string line;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                const auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                const auto eq = line.find('=');
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                if (eq == std::string::npos) {
                    throw IoError("config line " + std::to_string(lineno) +
                                  ": expected key=value");
                }
                auto trim = [](std::string s) {
                    const auto a = s.find_first_not_of(" \t\r");
                    const auto b = s.find_last_not_of(" \t\r");
                    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
                };
                const std::string key = trim(line.substr(0, eq));
                const std::string val = trim(line.substr(eq + 1));
                try {
                    if (key == "tol_eig") c.tol_eig = std::stod(val);
                    else if (key == "tol_solve") c.tol_solve = std::stod(val);
                    else if (key == "tol_norm") c.tol_norm = std::stod(val);
                    else if (key == "tol_cert") c.tol_cert = std::stod(val);
                    else if (key == "diagonalizable_kappa_max") c.diagonalizable_kappa_max = std::stod(val);
                    else if (key == "kron_dim_cap") c.kron_dim_cap = std::stoll(val);
                    else if (key == "numrange_angles") c.numrange_angles = std::stoi(val);
                    else if (key == "certify_angles") c.certify_angles = std::stoi(val);
                    else if (key == "margin_scale") c.margin_scale = std::stod(val);
                    else if (key == "probe_points") c.probe_points = std::stoi(val);
                    else if (key == "probe_cap") c.probe_cap = std::stod(val);
                    else throw IoError("config: unknown key '" + key + "'");
                } catch (const std::invalid_argument&) {
                    throw IoError("config: bad value for '" + key + "'");
                }
            }
        }
        if (o_tol_cert->count()) c.tol_cert = tol_cert;
        if (o_tol_eig->count()) c.tol_eig = tol_eig;
        if (o_tol_solve->count()) c.tol_solve = tol_solve;
        if (o_tol_norm->count()) c.tol_norm = tol_norm;
        if (o_angles->count()) c.numrange_angles = angles;
        if (o_cert_angles->count()) c.certify_angles = cert_angles;
        if (o_margin_scale->count()) c.margin_scale = margin_scale;
        if (o_kron_cap->count()) c.kron_dim_cap = kron_cap;
        if (o_probe_points->count()) c.probe_points = probe_points;
        return c;
    }
};

struct QuadCli {
    int nodes = 256;
    bool no_adaptive = false;
    double rel_tol = 1e-10;
    int max_nodes = 4096;

    void attach(CLI::App& cmd, int default_nodes = 256) {
        nodes = default_nodes;
        cmd.add_option("--nodes", nodes, "quadrature nodes per contour");
        cmd.add_flag("--no-adaptive", no_adaptive, "disable adaptive node doubling");
        cmd.add_option("--rel-tol", rel_tol, "adaptive refinement target");
        cmd.add_option("--max-nodes", max_nodes, "adaptive node cap");
    }
    matfun::QuadratureSpec resolve() const {
        return matfun::QuadratureSpec{nodes, !no_adaptive, rel_tol, max_nodes};
    }
};

funexpr::MatrixFunExpr load_matrix_expr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open function file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("function file parse failed: ") + e.what());
    }
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const int arity = j.value("arity", 1);
    std::vector<funexpr::FunExpr> entries;
    for (const auto& t : j.at("entries")) {
        entries.push_back(funexpr::parse(t.get<std::string>(), arity));
    }
    return funexpr::MatrixFunExpr(rows, cols, std::move(entries));
}

int dispatch(const std::vector<std::string>& args, bool allow_job);

// ---------------------------------------------------------------------------

int run_numrange(const std::string& a_path, int angles, const std::string& out,
                 const std::string& contour_out, std::optional<double> margin,
                 const Config& cfg) {
    const ComplexMatrix a = io::read_matrix(a_path);
    const auto nr = fieldvals::numrange(a, angles > 0 ? angles : cfg.numrange_angles);
    if (out.empty()) {
        fieldvals::write_csv(nr, std::cout);
    } else {
        std::ofstream os(out);
        if (!os) throw IoError("cannot open CSV output: " + out);
        fieldvals::write_csv(nr, os);
    }
    if (!contour_out.empty()) {
        const double m = margin.value_or(fieldvals::default_margin(nr, cfg));
        const auto g = fieldvals::enclosing_contour(nr, m);
        json body{{"command", "numrange"},
                  {"config", report::to_json(cfg)},
                  {"margin", m},
                  {"contour", report::to_json(g)}};
        report::write_report(report::envelope(std::move(body)), contour_out);
    }
    return kExitOk;
}

int run_eval(const std::string& fn, const std::vector<std::string>& matrix_paths,
             const QuadCli& quad, std::optional<double> margin, const std::string& out,
             const std::string& matrix_out, const Config& cfg) {
    const auto q = quad.resolve();
    json body{{"command", "eval"}, {"config", report::to_json(cfg)}, {"function", fn}};
    body["inputs"] = matrix_paths;

    if (matrix_paths.size() == 1) {
        const ComplexMatrix a = io::read_matrix(matrix_paths[0]);
        const auto enc = matfun::enclose(a, cfg, margin);
        const auto f = funexpr::parse(fn, 1);
        const auto r = matfun::eval_univariate(f, a, enc.contour, q, cfg);
        body["metadata"] = report::to_json(r.meta);
        body["contour"] = report::to_json(enc.contour);
        if (!matrix_out.empty()) {
            io::write_matrix(r.value, matrix_out);
            body["matrix_file"] = matrix_out;
        } else {
            body["matrix"] = report::matrix_to_json(r.value);
        }
    } else if (matrix_paths.size() == 2) {
        const ComplexMatrix a = io::read_matrix(matrix_paths[0]);
        const ComplexMatrix b = io::read_matrix(matrix_paths[1]);
        const auto enc_a = matfun::enclose(a, cfg, margin);
        const auto enc_b = matfun::enclose(b, cfg, margin);
        const auto f = funexpr::parse(fn, 2);
        const auto op = matfun::eval_bivariate(f, a, b, enc_a.contour, enc_b.contour, q, cfg);
        body["metadata"] = report::to_json(op.meta());
        body["operator_norm"] = op.norm(cfg);
        if (op.has_materialized()) {
            if (!matrix_out.empty()) {
                io::write_matrix(op.materialized(), matrix_out);
                body["matrix_file"] = matrix_out;
            } else {
                body["matrix"] = report::matrix_to_json(op.materialized());
            }
        } else {
            body["materialized"] = false;
        }
    } else {
        throw DimensionError("eval: expected one matrix (univariate) or two (bivariate)");
    }
    report::write_report(report::envelope(std::move(body)), out);
    return kExitOk;
}

int run_eval_multi(const std::string& fn, const std::vector<std::string>& matrix_paths,
                   const QuadCli& quad, std::optional<double> margin, const std::string& out,
                   const std::string& matrix_out, const Config& cfg) {
    if (matrix_paths.size() < 2 || matrix_paths.size() > 4) {
        throw DimensionError("eval-multi: need 2-4 matrices");
    }
    std::vector<ComplexMatrix> as;
    std::vector<fieldvals::Contour> gs;
    for (const auto& p : matrix_paths) {
        as.push_back(io::read_matrix(p));
        gs.push_back(matfun::enclose(as.back(), cfg, margin).contour);
    }
    const auto f = funexpr::parse(fn, static_cast<int>(as.size()));
    const auto r = matfun::eval_multivariate(f, as, gs, quad.resolve(), cfg);
    json body{{"command", "eval-multi"},
              {"config", report::to_json(cfg)},
              {"function", fn},
              {"inputs", matrix_paths},
              {"metadata", report::to_json(r.meta)},
              {"operator_norm", linalg::spectral_norm(r.value, cfg.tol_norm)}};
    if (!matrix_out.empty()) {
        io::write_matrix(r.value, matrix_out);
        body["matrix_file"] = matrix_out;
    }
    report::write_report(report::envelope(std::move(body)), out);
    return kExitOk;
}

int run_frechet(const std::string& fn, const std::string& a_path, const std::string& e_path,
                double h, const QuadCli& quad, const std::string& out,
                const std::string& matrix_out, const Config& cfg) {
    const ComplexMatrix a = io::read_matrix(a_path);
    const auto f = funexpr::parse(fn, 1);
    const auto q = quad.resolve();
    const auto r = frechet::frechet_norm_and_bound(f, a, q, cfg);
    json body{{"command", "frechet"},
              {"config", report::to_json(cfg)},
              {"function", fn},
              {"inputs", json::array({a_path})},
              {"result", report::to_json(r)}};
    if (!e_path.empty()) {
        const ComplexMatrix e = io::read_matrix(e_path);
        const ComplexMatrix dfe = r.op.apply(e);
        if (!matrix_out.empty()) {
            io::write_matrix(dfe, matrix_out);
            body["derivative_application_file"] = matrix_out;
        } else {
            body["derivative_application"] = report::matrix_to_json(dfe);
        }
        if (h > 0) {
            body["finite_difference_error"] =
                frechet::frechet_finite_difference_check(f, a, e, h, q, cfg);
            body["finite_difference_h"] = h;
        }
    }
    report::write_report(report::envelope(std::move(body)), out);
    return kExitOk;
}

int run_krylov(const std::string& fn, const std::string& a_path, const std::string& b_path,
               const std::string& ca_path, const std::string& cb_path, int k, int l,
               bool no_exact, bool no_bound, const QuadCli& quad, const std::string& out,
               const std::string& x_out, const Config& cfg) {
    const ComplexMatrix a = io::read_matrix(a_path);
    const ComplexMatrix b = io::read_matrix(b_path);
    const ComplexMatrix ca = io::read_matrix(ca_path);
    const ComplexMatrix cb = io::read_matrix(cb_path);
    if (ca.cols() != 1 || cb.cols() != 1) {
        throw DimensionError("krylov: c_A and c_B must be column vectors");
    }
    const auto f = funexpr::parse(fn, 2);
    const auto r = krylov::bivariate_krylov(f, a, b, ca.col(0), cb.col(0), k, l,
                                            quad.resolve(), cfg, !no_exact, !no_bound);
    json body{{"command", "krylov"},
              {"config", report::to_json(cfg)},
              {"function", fn},
              {"inputs", json::array({a_path, b_path, ca_path, cb_path})},
              {"k", k},
              {"l", l},
              {"result", report::to_json(r)}};
    if (!x_out.empty()) {
        io::write_matrix(r.x_kl, x_out);
        body["x_file"] = x_out;
    }
    report::write_report(report::envelope(std::move(body)), out);
    return kExitOk;
}

int run_certify(const std::string& inequality, const std::string& fn,
                const std::string& f_file, const std::vector<std::string>& a_paths,
                const std::string& b_path, const std::string& ensemble_arg, int cases,
                std::uint64_t seed, Eigen::Index min_size, Eigen::Index max_size,
                const std::string& kind, const QuadCli& quad, const std::string& out,
                const std::string& tsv_path, const Config& cfg) {
    const auto q = quad.resolve();
    std::vector<ensemble::CaseOutcome> outcomes;

    if (!ensemble_arg.empty()) {
        ensemble::EnsembleSpec spec;
        spec.inequality = inequality;
        spec.cases = cases;
        spec.seed = seed;
        spec.min_size = min_size;
        spec.max_size = max_size;
        spec.matrix_kind = kind;
        if (ensemble_arg != "default") {
            std::ifstream in(ensemble_arg);
            if (!in) throw IoError("cannot open ensemble file: " + ensemble_arg);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw IoError(std::string("ensemble file parse failed: ") + e.what());
            }
            spec.cases = j.value("cases", spec.cases);
            spec.seed = j.value("seed", spec.seed);
            spec.min_size = j.value("min_size", spec.min_size);
            spec.max_size = j.value("max_size", spec.max_size);
            spec.matrix_kind = j.value("matrix_kind", spec.matrix_kind);
            if (j.contains("inequality")) spec.inequality = j["inequality"].get<std::string>();
        }
        outcomes = ensemble::run_suite(spec, q, cfg);
    } else {
        // Single curated case from --fn/--A/--B.
        if (a_paths.empty()) throw DimensionError("certify: provide --A or --ensemble");
        std::vector<ComplexMatrix> as;
        for (const auto& p : a_paths) as.push_back(io::read_matrix(p));
        certify::CertificateReport rep;
        if (inequality == "cp1") {
            rep = certify::certify_univariate(funexpr::parse(fn, 1), as.at(0), q, cfg);
        } else if (inequality == "cp-matrix") {
            rep = certify::certify_univariate(load_matrix_expr(f_file), as.at(0), q, cfg);
        } else if (inequality == "bivariate" || inequality == "ando") {
            if (b_path.empty()) throw DimensionError("certify: " + inequality + " needs --B");
            const ComplexMatrix b = io::read_matrix(b_path);
            rep = inequality == "bivariate"
                      ? certify::certify_bivariate(funexpr::parse(fn, 2), as.at(0), b, q, cfg)
                      : certify::certify_ando(funexpr::parse(fn, 2), as.at(0), b, q, cfg);
        } else if (inequality == "multivariate") {
            rep = certify::certify_multivariate(
                funexpr::parse(fn, static_cast<int>(as.size())), as,
                matfun::QuadratureSpec{64, true, 1e-9, 256}, cfg);
        } else if (inequality == "lemma1" || inequality == "lemma2") {
            const auto fexpr = f_file.empty()
                                   ? funexpr::MatrixFunExpr(1, 1, {funexpr::parse(fn, 1)})
                                   : load_matrix_expr(f_file);
            auto pair = certify::lemma_harness(fexpr, as.at(0), q, cfg);
            rep = inequality == "lemma1" ? pair.dual_sup : pair.symmetrized;
        } else if (inequality == "frechet") {
            rep = certify::certify_frechet(funexpr::parse(fn, 1), as.at(0), q, cfg);
        } else {
            throw DimensionError("certify: unknown inequality '" + inequality + "'");
        }
        outcomes.push_back({"single", std::move(rep)});
    }

    json cases_json = json::array();
    bool all_pass = true;
    std::string tsv = report::tsv_header();
    for (const auto& o : outcomes) {
        json c = report::to_json(o.report);
        c["case_id"] = o.case_id;
        cases_json.push_back(std::move(c));
        tsv += report::tsv_row(o.case_id, o.report);
        all_pass = all_pass && o.report.pass;
    }
    json body{{"command", "certify"},
              {"config", report::to_json(cfg)},
              {"inequality", inequality},
              {"all_pass", all_pass},
              {"cases", std::move(cases_json)}};
    report::write_report(report::envelope(std::move(body)), out);
    if (!tsv_path.empty()) {
        if (tsv_path == "-") {
            std::cout << tsv;
        } else {
            std::ofstream os(tsv_path);
            if (!os) throw IoError("cannot open TSV output: " + tsv_path);
            os << tsv;
        }
    }
    return all_pass ? kExitOk : kExitRedFlag;
}

int run_lemma_harness(const std::string& fn, const std::string& f_file,
                      const std::string& a_path, const QuadCli& quad, const std::string& out,
                      const Config& cfg) {
    const ComplexMatrix a = io::read_matrix(a_path);
    const auto fexpr = f_file.empty() ? funexpr::MatrixFunExpr(1, 1, {funexpr::parse(fn, 1)})
                                      : load_matrix_expr(f_file);
    const auto pair = certify::lemma_harness(fexpr, a, quad.resolve(), cfg);
    json body{{"command", "lemma-harness"},
              {"config", report::to_json(cfg)},
              {"inputs", json::array({a_path})},
              {"dual_sup", report::to_json(pair.dual_sup)},
              {"symmetrized", report::to_json(pair.symmetrized)}};
    report::write_report(report::envelope(std::move(body)), out);
    return (pair.dual_sup.pass && pair.symmetrized.pass) ? kExitOk : kExitRedFlag;
}

int run_search(const std::string& fn, const std::vector<Eigen::Index>& sizes, int iters,
               std::uint64_t seed, bool normal_only, bool no_jordan, const std::string& out,
               const Config& cfg) {
    certify::SearchOptions opt;
    if (!sizes.empty()) opt.sizes = sizes;
    opt.iterations = iters;
    opt.seed = seed;
    opt.normal_only = normal_only;
    opt.include_jordan_seed = !no_jordan;
    const auto board = certify::extremal_search(funexpr::parse(fn, 2), opt, cfg);
    json records = json::array();
    for (const auto& r : board) {
        records.push_back(json{{"raw_ratio", r.raw_ratio},
                               {"origin", r.origin},
                               {"A", report::matrix_to_json(r.a)},
                               {"B", report::matrix_to_json(r.b)}});
    }
    json body{{"command", "search"},
              {"config", report::to_json(cfg)},
              {"function", fn},
              {"iterations", iters},
              {"seed", seed},
              {"normal_only", normal_only},
              {"leaderboard", std::move(records)}};
    report::write_report(report::envelope(std::move(body)), out);
    return kExitOk;
}

int run_job(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open job file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("job file parse failed: ") + e.what());
    }
    std::vector<std::string> args;
    args.push_back(j.at("command").get<std::string>());
    if (j.contains("args")) {
        for (const auto& [key, value] : j["args"].items()) {
            if (value.is_boolean()) {
                if (value.get<bool>()) args.push_back("--" + key);
            } else if (value.is_array()) {
                for (const auto& v : value) {
                    args.push_back("--" + key);
                    args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            } else {
                args.push_back("--" + key);
                args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
        }
    }
    return dispatch(args, /*allow_job=*/false);
}

int dispatch(const std::vector<std::string>& args, bool allow_job) {
    CLI::App app{"bivariate and multivariate matrix functions over numerical ranges"};
    app.require_subcommand(1);
    ConfigCli cc;
    cc.attach(app);

    // numrange
    auto* c_nr = app.add_subcommand("numrange", "sample W(A) and export CSV/contour");
    std::string nr_a, nr_out, nr_contour;
    int nr_angles = 0;
    double nr_margin = -1;
    c_nr->add_option("--A", nr_a, "matrix file")->required();
    c_nr->add_option("--angles", nr_angles, "sweep angles (default from config)");
    c_nr->add_option("--out", nr_out, "CSV output path (default stdout)");
    c_nr->add_option("--contour-out", nr_contour, "enclosing contour report path");
    c_nr->add_option("--margin", nr_margin, "contour margin (absolute)");

    // eval
    auto* c_ev = app.add_subcommand("eval", "evaluate f(A) or f{A,B} by contour quadrature");
    std::string ev_fn, ev_out, ev_mat_out, ev_b;
    std::vector<std::string> ev_a;
    double ev_margin = -1;
    QuadCli ev_quad;
    c_ev->add_option("--fn", ev_fn, "expression in x (or x,y)")->required();
    c_ev->add_option("--A", ev_a, "matrix file (repeat for bivariate)")->required();
    c_ev->add_option("--B", ev_b, "second matrix file");
    c_ev->add_option("--out", ev_out, "report path (default stdout)");
    c_ev->add_option("--matrix-out", ev_mat_out, "write the result matrix here");
    c_ev->add_option("--margin", ev_margin, "contour margin (absolute)");
    ev_quad.attach(*c_ev);

    // eval-multi
    auto* c_em = app.add_subcommand("eval-multi", "evaluate f{A_1,...,A_d}, d in 2..4");
    std::string em_fn, em_out, em_mat_out;
    std::vector<std::string> em_a;
    double em_margin = -1;
    QuadCli em_quad;
    c_em->add_option("--fn", em_fn, "expression in x1..xd")->required();
    c_em->add_option("--A", em_a, "matrix files (repeat per variable)")->required();
    c_em->add_option("--out", em_out, "report path");
    c_em->add_option("--matrix-out", em_mat_out, "write the Kronecker-form matrix here");
    c_em->add_option("--margin", em_margin, "contour margin (absolute)");
    em_quad.attach(*c_em, 64);

    // frechet
    auto* c_fr = app.add_subcommand("frechet", "Frechet derivative norm and bound");
    std::string fr_fn, fr_a, fr_e, fr_out, fr_mat_out;
    double fr_h = 0;
    QuadCli fr_quad;
    c_fr->add_option("--fn", fr_fn, "univariate expression")->required();
    c_fr->add_option("--A", fr_a, "matrix file")->required();
    c_fr->add_option("--E", fr_e, "direction matrix file");
    c_fr->add_option("--h", fr_h, "finite-difference step for the optional check");
    c_fr->add_option("--out", fr_out, "report path");
    c_fr->add_option("--matrix-out", fr_mat_out, "write Df{A}(E) here");
    fr_quad.attach(*c_fr);

    // krylov
    auto* c_kr = app.add_subcommand("krylov", "bivariate Arnoldi approximation of f{A,B}c");
    std::string kr_fn, kr_a, kr_b, kr_ca, kr_cb, kr_out, kr_x_out;
    int kr_k = 0, kr_l = 0;
    bool kr_no_exact = false, kr_no_bound = false;
    QuadCli kr_quad;
    c_kr->add_option("--fn", kr_fn, "bivariate expression")->required();
    c_kr->add_option("--A", kr_a)->required();
    c_kr->add_option("--B", kr_b)->required();
    c_kr->add_option("--cA", kr_ca, "left vector file")->required();
    c_kr->add_option("--cB", kr_cb, "right vector file")->required();
    c_kr->add_option("--k", kr_k, "left Krylov dimension")->required();
    c_kr->add_option("--l", kr_l, "right Krylov dimension")->required();
    c_kr->add_flag("--no-exact", kr_no_exact, "skip the exact-error computation");
    c_kr->add_flag("--no-bound", kr_no_bound, "skip the a-priori bound");
    c_kr->add_option("--out", kr_out, "report path");
    c_kr->add_option("--x-out", kr_x_out, "write the lifted vector here");
    kr_quad.attach(*c_kr);

    // certify
    auto* c_ce = app.add_subcommand("certify", "check the spectral-set inequalities");
    std::string ce_ineq, ce_fn, ce_ffile, ce_b, ce_ensemble, ce_out, ce_tsv;
    std::vector<std::string> ce_a;
    int ce_cases = 40;
    std::uint64_t ce_seed = 12345;
    Eigen::Index ce_min = 2, ce_max = 8;
    std::string ce_kind = "general";
    QuadCli ce_quad;
    c_ce->add_option("--inequality", ce_ineq,
                     "cp1|cp-matrix|bivariate|multivariate|ando|lemma1|lemma2|frechet")
        ->required()
        ->check(CLI::IsMember({"cp1", "cp-matrix", "bivariate", "multivariate", "ando",
                               "lemma1", "lemma2", "frechet"}));
    c_ce->add_option("--fn", ce_fn, "expression (single-case mode)");
    c_ce->add_option("--F", ce_ffile, "matrix-valued function JSON (cp-matrix/lemma)");
    c_ce->add_option("--A", ce_a, "matrix file(s)");
    c_ce->add_option("--B", ce_b, "second matrix file");
    c_ce->add_option("--ensemble", ce_ensemble, "'default' or an ensemble JSON file");
    c_ce->add_option("--cases", ce_cases, "ensemble case count");
    c_ce->add_option("--seed", ce_seed, "ensemble seed");
    c_ce->add_option("--min-size", ce_min);
    c_ce->add_option("--max-size", ce_max);
    c_ce->add_option("--kind", ce_kind, "general|normal|contraction|hpd");
    c_ce->add_option("--out", ce_out, "report path");
    c_ce->add_option("--tsv", ce_tsv, "summary TSV path ('-' for stdout)");
    ce_quad.attach(*c_ce);

    // lemma-harness
    auto* c_lh = app.add_subcommand("lemma-harness", "dual-transform inequality checks");
    std::string lh_fn, lh_ffile, lh_a, lh_out;
    QuadCli lh_quad;
    c_lh->add_option("--fn", lh_fn, "scalar expression (1x1 F)");
    c_lh->add_option("--F", lh_ffile, "matrix-valued function JSON");
    c_lh->add_option("--A", lh_a, "matrix file")->required();
    c_lh->add_option("--out", lh_out, "report path");
    lh_quad.attach(*c_lh);

    // search
    auto* c_se = app.add_subcommand("search", "hill-climb the raw bivariate ratio");
    std::string se_fn, se_out;
    std::vector<Eigen::Index> se_sizes;
    int se_iters = 1000;
    std::uint64_t se_seed = 0;
    bool se_normal = false, se_no_jordan = false;
    c_se->add_option("--fn", se_fn, "bivariate expression")->required();
    c_se->add_option("--sizes", se_sizes, "candidate matrix sizes");
    c_se->add_option("--iters", se_iters, "iteration budget");
    c_se->add_option("--seed", se_seed, "random seed");
    c_se->add_flag("--normal", se_normal, "restrict to normal (diagonal) pairs");
    c_se->add_flag("--no-jordan-seed", se_no_jordan, "do not seed with the Jordan pair");
    c_se->add_option("--out", se_out, "report path");

    // job
    CLI::App* c_job = nullptr;
    std::string job_file;
    if (allow_job) {
        c_job = app.add_subcommand("job", "run a JSON job specification");
        c_job->add_option("--file", job_file, "job JSON path")->required();
    }

    std::vector<const char*> argv;
    argv.push_back("bivarfun");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Config cfg = cc.resolve();
    auto opt_margin = [](double m) {
        return m > 0 ? std::optional<double>(m) : std::nullopt;
    };

    if (c_nr->parsed()) {
        return run_numrange(nr_a, nr_angles, nr_out, nr_contour,
                            opt_margin(nr_margin), cfg);
    }
    if (c_ev->parsed()) {
        std::vector<std::string> paths = ev_a;
        if (!ev_b.empty()) paths.push_back(ev_b);
        return run_eval(ev_fn, paths, ev_quad, opt_margin(ev_margin), ev_out, ev_mat_out,
                        cfg);
    }
    if (c_em->parsed()) {
        return run_eval_multi(em_fn, em_a, em_quad, opt_margin(em_margin), em_out,
                              em_mat_out, cfg);
    }
    if (c_fr->parsed()) {
        return run_frechet(fr_fn, fr_a, fr_e, fr_h, fr_quad, fr_out, fr_mat_out, cfg);
    }
    if (c_kr->parsed()) {
        return run_krylov(kr_fn, kr_a, kr_b, kr_ca, kr_cb, kr_k, kr_l, kr_no_exact,
                          kr_no_bound, kr_quad, kr_out, kr_x_out, cfg);
    }
    if (c_ce->parsed()) {
        return run_certify(ce_ineq, ce_fn, ce_ffile, ce_a, ce_b, ce_ensemble, ce_cases,
                           ce_seed, ce_min, ce_max, ce_kind, ce_quad, ce_out, ce_tsv, cfg);
    }
    if (c_lh->parsed()) {
        return run_lemma_harness(lh_fn, lh_ffile, lh_a, lh_quad, lh_out, cfg);
    }
    if (c_se->parsed()) {
        return run_search(se_fn, se_sizes, se_iters, se_seed, se_normal, se_no_jordan,
                          se_out, cfg);
    }
    if (c_job && c_job->parsed()) {
        return run_job(job_file);
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args, /*allow_job=*/true);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SyntaxError& e) {
        std::cerr << "expression error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return kExitUnexpected;
    }
}
