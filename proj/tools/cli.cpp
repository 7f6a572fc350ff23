// Copyright 2026 The qlan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlan/errors.hpp"
#include "qlan/estimator.hpp"
#include "qlan/lan_channels.hpp"
#include "qlan/parallel.hpp"
#include "qlan/qsde.hpp"
#include "qlan/risk_bench.hpp"

namespace qlan::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ParamSpec {
    std::string name;   // canonical key, also the long flag
    std::string alias;  // optional second flag
    std::string value;  // default
    std::string help;
};

// Resolved parameters of one run. Getters parse, validate the syntax and store the canonical
// spelling used for the config echo.
class Params {
public:
    Params(std::string command, std::vector<ParamSpec> specs)
        : command_(std::move(command)), specs_(std::move(specs)) {
        for (const auto& s : specs_) values_[s.name] = s.value;
    }

    const std::string& command() const { return command_; }
    std::vector<ParamSpec>& specs() { return specs_; }
    std::string& raw(const std::string& k) { return values_.at(k); }
    bool has(const std::string& k) const { return values_.count(k) != 0; }

    double real(const std::string& k) {
        const std::string v = trim(values_.at(k));
        double x = 0.0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() ||
            !std::isfinite(x)) {
            bad(k, "expected a finite number");
        }
        values_[k] = num(x);
        return x;
    }

    std::int64_t integer(const std::string& k) {
        const std::string v = trim(values_.at(k));
        std::int64_t x = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
            // allow 1e6 style integers
            const double d = real(k);
            if (d != std::floor(d) || std::abs(d) > 9e15) bad(k, "expected an integer");
            x = std::int64_t(d);
        }
        values_[k] = std::to_string(x);
        return x;
    }

    std::vector<double> reals(const std::string& k) {
        std::vector<double> out;
        std::vector<std::string> canon;
        for (const std::string& part : split(values_.at(k), ',')) {
            Params tmp(command_, {{k, "", part, ""}});
            out.push_back(tmp.real(k));
            canon.push_back(tmp.raw(k));
        }
        if (out.empty()) bad(k, "expected a comma separated list");
        values_[k] = join(canon);
        return out;
    }

    std::vector<std::int64_t> integers(const std::string& k) {
        std::vector<std::int64_t> out;
        std::vector<std::string> canon;
        for (const std::string& part : split(values_.at(k), ',')) {
            Params tmp(command_, {{k, "", part, ""}});
            out.push_back(tmp.integer(k));
            canon.push_back(tmp.raw(k));
        }
        if (out.empty()) bad(k, "expected a comma separated list");
        values_[k] = join(canon);
        return out;
    }

    Eigen::Vector3d triple(const std::string& k) {
        const auto v = reals(k);
        if (v.size() != 3) bad(k, "expected three comma separated numbers");
        return {v[0], v[1], v[2]};
    }

    std::string choice(const std::string& k, const std::vector<std::string>& allowed) {
        const std::string v = trim(values_.at(k));
        for (const auto& a : allowed) {
            if (v == a) {
                values_[k] = v;
                return v;
            }
        }
        std::string all;
        for (const auto& a : allowed) all += (all.empty() ? "" : ", ") + a;
        bad(k, "expected one of {" + all + "}");
        return v;
    }

    bool flag(const std::string& k) { return choice(k, {"true", "false"}) == "true"; }

    // Keys in declaration order with canonical values, excluding run plumbing.
    std::vector<std::pair<std::string, std::string>> echo() const {
        std::vector<std::pair<std::string, std::string>> out{{"command", command_}};
        for (const auto& s : specs_) {
            if (s.name == "out" || s.name == "threads" || s.name == "config") continue;
            out.emplace_back(s.name, values_.at(s.name));
        }
        return out;
    }

    [[noreturn]] static void bad(const std::string& k, const std::string& what) {
        throw ValidationError("--" + k + ": " + what);
    }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
        return s;
    }

    std::string command_;
    std::vector<ParamSpec> specs_;
    std::map<std::string, std::string> values_;
};

// Rethrows module validation errors with the owning flag named.
template <class F>
void check(const std::string& flag, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        throw ValidationError("--" + flag + ": " + e.what());
    }
}

std::vector<ParamSpec> common_specs(const std::string& format) {
    return {{"seed", "", "7", "master seed"},
            {"threads", "", "0", "OpenMP threads, 0 for the runtime default"},
            {"out", "", "", "output file, stdout when empty"},
            {"format", "", format, "csv or json"},
            {"config", "", "", "key=value file; flags override it"}};
}

std::vector<ParamSpec> estimator_specs() {
    const EstimatorConfig d;
    return {{"sampler", "", "gaussian", "stage-2 sampler: gaussian or exact"},
            {"kappa", "", num(d.kappa), "stage-1 exponent"},
            {"eps", "", num(d.eps), "localization exponent"},
            {"eta", "", num(d.eta), "truncation exponent"},
            {"t", "", num(d.t), "interaction time, 0 for ln n"},
            {"t-energy", "", num(d.t_energy), "energy measurement time, 0 for n"},
            {"fock-dim", "", std::to_string(d.fock_dim), "Fock cutoff, 0 for automatic"},
            {"truncate", "", "true", "truncate the local estimate at 3 n^eta"}};
}

std::vector<ParamSpec> specs_for(const std::string& cmd) {
    std::vector<ParamSpec> s;
    std::string format = "csv";
    if (cmd == "lan-dist") {
        s = {{"mu", "", "0.8", "reference eigenvalue"},
             {"u", "", "1,1,1", "local parameter u_x,u_y,u_z"},
             {"n-list", "n", "20,50,100,200,400", "sample sizes"},
             {"fock-dim", "", "0", "Fock cutoff, 0 for automatic"}};
    } else if (cmd == "risk") {
        format = "json";
        s = {{"mu0", "", "0.75", "centre eigenvalue"},
             {"n-list", "n", "1000000", "sample sizes"},
             {"trials", "", "10000", "Monte Carlo trials per grid point"},
             {"loss", "", "local", "trace, fidelity or local"},
             {"radii", "", "0,0.5,1", "grid radii in units of n^{-1/2+eps}"}};
        auto e = estimator_specs();
        s.insert(s.end(), e.begin(), e.end());
    } else if (cmd == "qsde-check") {
        s = {{"mu", "", "0.75", "reference eigenvalue"},
             {"n-list", "n", "10000", "sample sizes"},
             {"m-list", "m", "1,2", "excitation sectors"},
             {"t", "", "5", "interaction time"},
             {"steps", "", "2000", "collision steps"},
             {"eps", "", "0.05", "typical-set exponent of the bound"},
             {"eps2", "", "0.05", "distance of mu from 1/2 in the bound"},
             {"c", "", num(xi_bound_constant), "bound constant"}};
    } else if (cmd == "estimate") {
        format = "json";
        s = {{"mu", "", "0.75", "eigenvalue of the true state"},
             {"u", "", "0,0,0", "true state is local_qubit_state(mu, u / sqrt(n))"},
             {"n", "", "10000", "sample size"}};
        auto e = estimator_specs();
        s.insert(s.end(), e.begin(), e.end());
    } else if (cmd == "hoeffding") {
        s = {{"bloch", "", "0.3,-0.2,0.5", "Bloch vector of the true state"},
             {"n-list", "n", "1000,10000,100000", "sample sizes"},
             {"eps", "eps-list", "0.1,0.2", "exponents"},
             {"kappa", "", "0.1", "stage-1 exponent"},
             {"trials", "", "10000", "trials per cell"}};
    }
    auto c = common_specs(format);
    s.insert(s.end(), c.begin(), c.end());
    return s;
}

// Applies key=value lines (an optional leading '#' is ignored) for keys not set by flags.
void apply_config(Params& p, const std::string& path, const std::map<std::string, bool>& given) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--config: cannot read '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        std::string l = trim(line);
        if (!l.empty() && l[0] == '#') l = trim(l.substr(1));
        const auto eq = l.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(l.substr(0, eq));
        const std::string value = trim(l.substr(eq + 1));
        if (key == "command") {
            if (value != p.command()) {
                throw ValidationError("--config: file is for '" + value + "', not '" +
                                      p.command() + "'");
            }
            continue;
        }
        if (!p.has(key) || key == "config") {
            throw ValidationError("--config: unknown key '" + key + "'");
        }
        if (!given.at(key)) p.raw(key) = value;
    }
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ComputationError("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw ComputationError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ComputationError("cannot move output into '" + path + "': " + ec.message());
    }
}

std::string csv_echo(const Params& p) {
    std::string s;
    for (const auto& [k, v] : p.echo()) s += "# " + k + "=" + v + "\n";
    return s;
}

json json_echo(const Params& p) {
    json c = json::object();
    for (const auto& [k, v] : p.echo()) c[k] = v;
    return c;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
}

EstimatorConfig estimator_config(Params& p) {
    EstimatorConfig c;
    c.sampler = p.choice("sampler", {"gaussian", "exact"}) == "exact" ? SamplerMode::exact
                                                                       : SamplerMode::gaussian;
    c.kappa = p.real("kappa");
    c.eps = p.real("eps");
    c.eta = p.real("eta");
    c.t = p.real("t");
    c.t_energy = p.real("t-energy");
    c.fock_dim = int(p.integer("fock-dim"));
    c.truncate = p.flag("truncate");
    check("kappa", [&] { validate_config(c); });
    return c;
}

std::string run_lan_dist(Params& p, bool as_json) {
    const double mu = p.real("mu");
    const LocalParam u = p.triple("u");
    const auto n_list = p.integers("n-list");
    int dim = int(p.integer("fock-dim"));
    check("mu", [&] { validate_params(ModelParams{mu, 1}); });
    if (dim < 0) Params::bad("fock-dim", "must be >= 0");
    for (auto n : n_list) {
        if (n < 1) Params::bad("n-list", "sample sizes must be >= 1");
    }
    if (dim == 0) dim = auto_fock_dim(mu, u);
    const ConvergenceTable t = convergence_sweep(mu, u, n_list, dim);
    if (as_json) {
        json j;
        j["config"] = json_echo(p);
        j["fock_dim_used"] = dim;
        j["rows"] = json::array();
        for (const auto& r : t.rows) {
            j["rows"].push_back({{"n", r.n},
                                 {"dist_T", jnum(r.dist_T)},
                                 {"dist_S", jnum(r.dist_S)},
                                 {"status", r.status}});
        }
        j["slope_T"] = jnum(t.slope_T);
        j["slope_S"] = jnum(t.slope_S);
        j["resid_T"] = jnum(t.resid_T);
        j["resid_S"] = jnum(t.resid_S);
        return j.dump(2) + "\n";
    }
    std::string s = csv_echo(p);
    s += csv_line({"n", "dist_T", "dist_S", "slope_T", "slope_S", "status"});
    for (const auto& r : t.rows) {
        s += csv_line({std::to_string(r.n), num(r.dist_T), num(r.dist_S), num(t.slope_T),
                       num(t.slope_S), "\"" + r.status + "\""});
    }
    return s;
}

std::string run_risk(Params& p, bool as_json) {
    RiskConfig rc;
    rc.mu0 = p.real("mu0");
    rc.n_list = p.integers("n-list");
    rc.trials = p.integer("trials");
    const std::string loss = p.choice("loss", {"trace", "fidelity", "local"});
    rc.loss = loss == "trace" ? LossKind::trace
              : loss == "fidelity" ? LossKind::fidelity
                                   : LossKind::local;
    rc.radii = p.reals("radii");
    rc.est = estimator_config(p);
    rc.seed = std::uint64_t(p.integer("seed"));
    check("mu0", [&] { validate_params(ModelParams{rc.mu0, 1}); });
    check("n-list", [&] { validate_risk_config(rc); });
    for (auto n : rc.n_list) check("radii", [&] { risk_grid(rc.mu0, n, rc.est.eps, rc.radii); });

    const RiskReport rep = local_sup_risk(rc);
    if (as_json) {
        json j;
        j["config"] = json_echo(p);
        j["rows"] = json::array();
        for (const auto& r : rep.rows) {
            const auto& b = r.point.rho.bloch();
            j["rows"].push_back({{"n", r.n},
                                 {"index", r.point.index},
                                 {"axis", std::string(1, r.point.axis)},
                                 {"sign", r.point.sign},
                                 {"radius", r.point.radius},
                                 {"distance", r.point.distance},
                                 {"bloch", {b.x(), b.y(), b.z()}},
                                 {"risk", jnum(r.risk.mean)},
                                 {"stderr", jnum(r.risk.stderr_mean)},
                                 {"risk_total_n", jnum(r.risk.mean_total_n)},
                                 {"trials", r.risk.trials},
                                 {"truncations", r.risk.truncations},
                                 {"failures", r.risk.failures}});
        }
        const RiskSup& first = rep.sups.front();
        j["sup"] = jnum(first.sup);
        j["sup_stderr"] = jnum(first.sup_stderr);
        j["sup_total_n"] = jnum(first.sup_total_n);
        j["reference"] = jnum(rep.reference);
        j["argmax"] = first.argmax;
        j["by_n"] = json::array();
        for (const auto& s : rep.sups) {
            j["by_n"].push_back({{"n", s.n},
                                 {"sup", jnum(s.sup)},
                                 {"sup_stderr", jnum(s.sup_stderr)},
                                 {"sup_total_n", jnum(s.sup_total_n)},
                                 {"argmax", s.argmax}});
        }
        return j.dump(2) + "\n";
    }
    std::string s = csv_echo(p);
    s += csv_line({"n", "index", "axis", "sign", "radius", "distance", "risk", "stderr",
                   "risk_total_n", "trials", "truncations", "failures", "reference"});
    for (const auto& r : rep.rows) {
        s += csv_line({std::to_string(r.n), std::to_string(r.point.index),
                       std::string(1, r.point.axis), std::to_string(r.point.sign),
                       num(r.point.radius), num(r.point.distance), num(r.risk.mean),
                       num(r.risk.stderr_mean), num(r.risk.mean_total_n),
                       std::to_string(r.risk.trials), std::to_string(r.risk.truncations),
                       std::to_string(r.risk.failures), num(rep.reference)});
    }
    return s;
}

std::string run_qsde_check(Params& p, bool as_json) {
    const double mu = p.real("mu");
    const auto n_list = p.integers("n-list");
    const auto m_raw = p.integers("m-list");
    const double t = p.real("t");
    const auto steps = p.integer("steps");
    const double eps = p.real("eps");
    const double eps2 = p.real("eps2");
    const double c = p.real("c");
    check("mu", [&] { validate_params(ModelParams{mu, 1}); });
    for (auto n : n_list) {
        if (n < 1) Params::bad("n-list", "sample sizes must be >= 1");
    }
    std::vector<int> m_list;
    for (auto m : m_raw) {
        if (m < 1 || m > 8) Params::bad("m-list", "sectors must lie in [1, 8]");
        m_list.push_back(int(m));
    }
    if (!(t > 0.0)) Params::bad("t", "must be > 0");
    if (steps < 1 || steps > 1000000) Params::bad("steps", "must lie in [1, 1e6]");
    if (!(eps > 0.0 && eps < 0.5)) Params::bad("eps", "must lie in (0, 1/2)");
    if (!(eps2 > 0.0 && eps2 < 0.5)) Params::bad("eps2", "must lie in (0, 1/2)");
    if (!(c > 0.0)) Params::bad("c", "must be > 0");
    for (int m : m_list) {
        const double size = collision_sector_size(m, int(steps));
        if (size > double(default_memory_cap)) {
            Params::bad("steps", "sector m = " + std::to_string(m) + " needs " + num(size) +
                                     " entries, above the memory cap");
        }
    }
    const auto rows = qsde_check(mu, n_list, m_list, t, int(steps), eps, eps2, c);
    if (as_json) {
        json j;
        j["config"] = json_echo(p);
        j["rows"] = json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"n", r.n},
                                 {"j", double(r.twice_j) / 2.0},
                                 {"m", r.m},
                                 {"t", r.t},
                                 {"overlap", jnum(r.overlap)},
                                 {"bound", jnum(r.bound)},
                                 {"slope", jnum(r.slope)},
                                 {"steps", r.steps},
                                 {"survival", jnum(r.survival)},
                                 {"survival_ref", jnum(r.survival_ref)},
                                 {"overlap_osc", jnum(r.overlap_osc)},
                                 {"overlap_corrected", jnum(r.overlap_corrected)},
                                 {"deficit", jnum(r.deficit)}});
        }
        return j.dump(2) + "\n";
    }
    std::string s = csv_echo(p);
    s += csv_line({"n", "j", "m", "t", "overlap", "bound", "slope", "steps", "survival",
                   "survival_ref", "overlap_osc", "overlap_corrected", "deficit"});
    for (const auto& r : rows) {
        s += csv_line({std::to_string(r.n), num(double(r.twice_j) / 2.0), std::to_string(r.m),
                       num(r.t), num(r.overlap), num(r.bound), num(r.slope),
                       std::to_string(r.steps), num(r.survival), num(r.survival_ref),
                       num(r.overlap_osc), num(r.overlap_corrected), num(r.deficit)});
    }
    return s;
}

std::string run_estimate(Params& p, bool as_json) {
    const double mu = p.real("mu");
    const LocalParam u = p.triple("u");
    const std::int64_t n = p.integer("n");
    const EstimatorConfig c = estimator_config(p);
    const std::uint64_t seed = std::uint64_t(p.integer("seed"));
    check("mu", [&] { validate_params(ModelParams{mu, n}); });
    QubitState rho;
    check("u", [&] {
        try {
            rho = QubitState::from_matrix(local_qubit_state(mu, u / std::sqrt(double(n))));
        } catch (const OutsideModelError& e) {
            throw ValidationError(e.what());
        }
    });
    Rng rng = Rng::derive(seed, {std::uint64_t(n)});
    const EstimateResult e = full_estimate(rho, n, c, rng);
    const double scale = double(e.n_rest);
    const double l_local = loss_local(e.u_true, e.u_hat, e.stage1.mu_tilde);
    const double l_trace = scale * loss_trace_sq(rho, e.rho_hat);
    const double l_fid = scale * loss_fidelity(rho, e.rho_hat);
    auto vec = [](const Eigen::Vector3d& v) { return json{v.x(), v.y(), v.z()}; };
    if (as_json) {
        json j;
        j["config"] = json_echo(p);
        j["n_tilde"] = e.stage1.n_tilde;
        j["n_rest"] = e.n_rest;
        j["r_tilde"] = vec(e.stage1.r_tilde);
        j["mu_tilde"] = e.stage1.mu_tilde;
        j["u_true"] = vec(e.u_true);
        j["raw"] = {{"ux", e.raw.ux}, {"uy", e.raw.uy}, {"g", e.raw.g}};
        if (e.raw.twice_j >= 0) j["raw"]["j"] = double(e.raw.twice_j) / 2.0;
        j["truncated"] = {e.truncated[0], e.truncated[1], e.truncated[2]};
        j["u_hat"] = vec(e.u_hat);
        j["bloch_true"] = vec(rho.bloch());
        j["bloch_hat"] = vec(e.rho_hat.bloch());
        j["loss"] = {{"local", l_local}, {"trace", l_trace}, {"fidelity", l_fid}};
        return j.dump(2) + "\n";
    }
    std::string s = csv_echo(p);
    s += csv_line({"n_tilde", "n_rest", "mu_tilde", "u_true_x", "u_true_y", "u_true_z",
                   "u_hat_x", "u_hat_y", "u_hat_z", "truncated", "loss_local", "loss_trace",
                   "loss_fidelity"});
    const int tr = int(e.truncated[0]) + int(e.truncated[1]) + int(e.truncated[2]);
    s += csv_line({std::to_string(e.stage1.n_tilde), std::to_string(e.n_rest),
                   num(e.stage1.mu_tilde), num(e.u_true.x()), num(e.u_true.y()),
                   num(e.u_true.z()), num(e.u_hat.x()), num(e.u_hat.y()), num(e.u_hat.z()),
                   std::to_string(tr), num(l_local), num(l_trace), num(l_fid)});
    return s;
}

std::string run_hoeffding(Params& p, bool as_json) {
    const Eigen::Vector3d b = p.triple("bloch");
    const auto n_list = p.integers("n-list");
    const auto eps = p.reals("eps");
    const double kappa = p.real("kappa");
    const auto trials = p.integer("trials");
    const std::uint64_t seed = std::uint64_t(p.integer("seed"));
    if (b.norm() > 1.0) Params::bad("bloch", "needs |r| <= 1");
    for (auto n : n_list) {
        if (n < 1) Params::bad("n-list", "sample sizes must be >= 1");
        if (stage1_size(n, kappa) < 3) Params::bad("n-list", "n^{1-kappa} must be >= 3");
    }
    for (double e : eps) {
        if (!(e >= 0.0 && e <= 2.0)) Params::bad("eps", "must lie in [0, 2]");
    }
    if (!(kappa > 0.0 && kappa < 1.0)) Params::bad("kappa", "must lie in (0, 1)");
    if (trials < 1) Params::bad("trials", "must be >= 1");
    const auto rows = hoeffding_check(QubitState(b), n_list, eps, kappa, trials, seed);
    if (as_json) {
        json j;
        j["config"] = json_echo(p);
        j["rows"] = json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"n", r.n},
                                 {"eps", r.eps},
                                 {"kappa", r.kappa},
                                 {"n_tilde", r.n_tilde},
                                 {"trials", r.trials},
                                 {"frequency", r.frequency},
                                 {"bound", jnum(r.bound)},
                                 {"bad_contribution", r.bad_contribution},
                                 {"bad_bound", jnum(r.bad_bound)},
                                 {"flag", r.flag}});
        }
        return j.dump(2) + "\n";
    }
    std::string s = csv_echo(p);
    s += csv_line({"n", "eps", "kappa", "n_tilde", "trials", "frequency", "bound",
                   "bad_contribution", "bad_bound", "flag"});
    for (const auto& r : rows) {
        s += csv_line({std::to_string(r.n), num(r.eps), num(r.kappa), std::to_string(r.n_tilde),
                       std::to_string(r.trials), num(r.frequency), num(r.bound),
                       num(r.bad_contribution), num(r.bad_bound), r.flag});
    }
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> commands{"lan-dist", "risk", "qsde-check", "estimate",
                                            "hoeffding"};
    const std::map<std::string, std::string> about{
        {"lan-dist", "Distance between the n-qubit model and its Gaussian limit over n"},
        {"risk", "Monte Carlo local minimax risk of the two-stage estimator"},
        {"qsde-check", "Spin-field dynamics against the closed-form approximation"},
        {"estimate", "One run of the two-stage estimator with diagnostics"},
        {"hoeffding", "Stage-1 tail frequencies against the Hoeffding bound"}};
    CLI::App app("Two-stage qubit estimation and local asymptotic normality experiments", "qlan");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::vector<std::unique_ptr<Params>> params;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    for (const auto& cmd : commands) {
        params.push_back(std::make_unique<Params>(cmd, specs_for(cmd)));
        Params& p = *params.back();
        CLI::App* sub = app.add_subcommand(cmd, about.at(cmd));
        for (auto& s : p.specs()) {
            std::string flags = "--" + s.name;
            if (!s.alias.empty()) flags += ",--" + s.alias;
            options[cmd][s.name] = sub->add_option(flags, p.raw(s.name), s.help);
        }
    }

    std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 consumes from the back
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    std::size_t idx = 0;
    while (app.got_subcommand(commands[idx]) == false) ++idx;
    Params& p = *params[idx];
    const std::string& cmd = commands[idx];
    std::string out_path;
    try {
        std::map<std::string, bool> given;
        for (const auto& [k, opt] : options[cmd]) given[k] = opt->count() > 0;
        if (!p.raw("config").empty()) apply_config(p, p.raw("config"), given);
        out_path = p.raw("out");
        const int threads = int(p.integer("threads"));
        if (threads < 0) Params::bad("threads", "must be >= 0");
        set_thread_count(threads);
        if (p.integer("seed") < 0) Params::bad("seed", "must be >= 0");
        const bool as_json = p.choice("format", {"csv", "json"}) == "json";

        std::string text;
        if (cmd == "lan-dist") text = run_lan_dist(p, as_json);
        if (cmd == "risk") text = run_risk(p, as_json);
        if (cmd == "qsde-check") text = run_qsde_check(p, as_json);
        if (cmd == "estimate") text = run_estimate(p, as_json);
        if (cmd == "hoeffding") text = run_hoeffding(p, as_json);

        if (out_path.empty()) {
            out << text;
        } else {
            write_atomic(out_path, text);
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qlan::cli
