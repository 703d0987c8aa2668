#include "viscocal/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace viscocal {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_time_series(const std::filesystem::path& path, const TimeSeries& ts) {
    if (ts.columns.size() != ts.names.size())
        throw std::invalid_argument("write_time_series: column/name mismatch");
    for (const auto& c : ts.columns)
        if (c.size() != ts.t.size()) throw std::invalid_argument("write_time_series: ragged columns");
    for (std::size_t i = 1; i < ts.t.size(); ++i)
        if (!(ts.t[i] > ts.t[i - 1])) throw std::invalid_argument("write_time_series: t must increase");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_time_series: cannot open " + path.string());
    out << "t";
    for (const auto& n : ts.names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < ts.t.size(); ++i) {
        out << format_g17(ts.t[i]);
        for (const auto& c : ts.columns) out << "," << format_g17(c[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_time_series: write failed for " + path.string());
}

TimeSeries read_time_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_time_series: cannot open " + path.string());
    TimeSeries ts;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_time_series: empty file");
    std::stringstream head(line);
    std::string tok;
    bool first = true;
    while (std::getline(head, tok, ',')) {
        if (first) {
            if (tok != "t") throw std::runtime_error("read_time_series: first column must be t");
            first = false;
        } else {
            ts.names.push_back(tok);
        }
    }
    ts.columns.resize(ts.names.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::size_t col = 0;
        while (std::getline(row, tok, ',')) {
            const double v = std::stod(tok);
            if (col == 0)
                ts.t.push_back(v);
            else if (col - 1 < ts.columns.size())
                ts.columns[col - 1].push_back(v);
            else
                throw std::runtime_error("read_time_series: extra column in row");
            ++col;
        }
        if (col != ts.names.size() + 1) throw std::runtime_error("read_time_series: short row");
    }
    return ts;
}

SoeKernel kernel_from_json(const json& j) {
    if (j.contains("alpha") && !j.contains("weights"))
        throw std::invalid_argument("kernel_from_json: fractional spec needs kernel_from_spec");
    return SoeKernel(j.at("weights").get<std::vector<double>>(),
                     j.at("rates").get<std::vector<double>>());
}

json kernel_to_json(const SoeKernel& k) {
    return json{{"weights", k.weights()}, {"rates", k.rates()}};
}

SoeKernel load_kernel_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_kernel_file: cannot open " + path.string());
    json j;
    in >> j;
    return kernel_from_json(j);
}

void save_kernel_file(const std::filesystem::path& path, const SoeKernel& k) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_kernel_file: cannot open " + path.string());
    out << kernel_to_json(k).dump(2) << "\n";
}

RationalLaplace pole_residue_from_json(const json& j) {
    RationalLaplace rl;
    const auto pr = j.at("poles_re").get<std::vector<double>>();
    const auto pi = j.at("poles_im").get<std::vector<double>>();
    const auto rr = j.at("residues_re").get<std::vector<double>>();
    const auto ri = j.at("residues_im").get<std::vector<double>>();
    if (pr.size() != pi.size() || rr.size() != ri.size() || pr.size() != rr.size())
        throw std::invalid_argument("pole_residue_from_json: array length mismatch");
    for (std::size_t i = 0; i < pr.size(); ++i) {
        rl.poles.emplace_back(pr[i], pi[i]);
        rl.residues.emplace_back(rr[i], ri[i]);
    }
    rl.constant = j.value("constant", 0.0);
    return rl;
}

json pole_residue_to_json(const RationalLaplace& rl) {
    std::vector<double> pr, pi, rr, ri;
    for (std::size_t i = 0; i < rl.poles.size(); ++i) {
        pr.push_back(rl.poles[i].real());
        pi.push_back(rl.poles[i].imag());
        rr.push_back(rl.residues[i].real());
        ri.push_back(rl.residues[i].imag());
    }
    return json{{"poles_re", pr}, {"poles_im", pi}, {"residues_re", rr}, {"residues_im", ri},
                {"constant", rl.constant}};
}

RationalLaplace load_pole_residue_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_pole_residue_file: cannot open " + path.string());
    json j;
    in >> j;
    return pole_residue_from_json(j);
}

void save_pole_residue_file(const std::filesystem::path& path, const RationalLaplace& rl) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_pole_residue_file: cannot open " + path.string());
    out << pole_residue_to_json(rl).dump(2) << "\n";
}

KernelSpecResult kernel_from_spec(const json& spec, const std::filesystem::path& base_dir) {
    KernelSpecResult out;
    if (spec.contains("zero") && spec["zero"].get<bool>()) {
        out.kernel = SoeKernel::zero();
        out.provenance = json{{"zero", true}};
        return out;
    }
    if (spec.contains("file")) {
        const auto p = base_dir / spec["file"].get<std::string>();
        out.kernel = load_kernel_file(p);
        out.provenance = json{{"file", spec["file"]}};
        return out;
    }
    if (spec.contains("weights")) {
        out.kernel = kernel_from_json(spec);
        out.provenance = json{{"inline", true}};
        return out;
    }
    if (spec.contains("alpha")) {
        const double alpha = spec.at("alpha").get<double>();
        const int modes = spec.value("modes", 22);
        const double s_min = spec.value("s_min", 1e-3);
        const double s_max = spec.value("s_max", 1e3);
        const int n_samples = spec.value("n_samples", 400);
        const double tol = spec.value("tol", 1e-12);
        const auto fit = soe_from_fractional(alpha, s_min, s_max, n_samples, tol, modes);
        out.kernel = fit.kernel;
        out.provenance = json{{"alpha", alpha},
                              {"modes", modes},
                              {"s_min", s_min},
                              {"s_max", s_max},
                              {"n_samples", n_samples},
                              {"tol", tol},
                              {"laplace_rel_error", fit.laplace_rel_error},
                              {"time_rel_error", fit.time_rel_error},
                              {"dropped_constant", fit.dropped_constant}};
        return out;
    }
    throw std::invalid_argument("kernel_from_spec: unrecognized kernel specification");
}

LoadSpec load_spec_from_json(const json& j) {
    LoadSpec s;
    const std::string kind = j.value("kind", "bending");
    if (kind == "bending")
        s.kind = LoadSpec::Kind::Bending;
    else if (kind == "extension")
        s.kind = LoadSpec::Kind::Extension;
    else
        throw std::invalid_argument("load_spec_from_json: kind must be bending|extension");
    s.magnitude = j.value("magnitude", s.kind == LoadSpec::Kind::Bending ? 1.0 : 100.0);
    s.t_load = j.value("t_load", 0.8);
    return s;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_run_config: cannot open " + path.string());
    json j;
    in >> j;

    RunConfig cfg;
    cfg.raw = j;
    cfg.base_dir = path.parent_path();

    const json& g = j.at("geometry");
    cfg.mesh = build_mesh(g.value("Lx", 1.0), g.value("Ly", 0.1), g.value("Lz", 0.04),
                          g.value("nx", 12), g.value("ny", 2), g.value("nz", 1));

    if (j.contains("material")) {
        const json& m = j["material"];
        cfg.material.young_E = m.value("E", 1e3);
        cfg.material.poisson_nu = m.value("nu", 0.3);
        cfg.material.density = m.value("rho", 1.0);
    }
    cfg.material.validate();

    if (j.contains("solver")) {
        const json& s = j["solver"];
        cfg.solver.T_final = s.value("T", 4.0);
        cfg.solver.n_steps = s.value("n_steps", 100);
        cfg.solver.newmark_beta = s.value("beta", 0.25);
        cfg.solver.newmark_gamma = s.value("gamma", 0.5);
    }
    cfg.solver.validate();

    if (j.contains("load")) cfg.load = load_spec_from_json(j["load"]);
    return cfg;
}

} // namespace viscocal
