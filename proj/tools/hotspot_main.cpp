// Batch front end for the hotspot laboratory: ground-state profiles and
// moment tables, NLEP branch scans / Hopf location / large-tau checks,
// coupled steady-state solves with scaling sweeps, and time integration.
// Emits CSV + JSON artifacts with deterministic formatting (17 significant
// digits, LF endings, timestamps only in the run manifest).
//
// Exit codes: 0 success and all built-in checks pass, 1 numerical or check
// failure, 2 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hotspot/ground_state.hpp"
#include "hotspot/io.hpp"
#include "hotspot/linearized_operator.hpp"
#include "hotspot/nlep.hpp"
#include "hotspot/pde_sim.hpp"
#include "hotspot/steady_state.hpp"

namespace {

using namespace hotspot;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::strtod(item.c_str(), nullptr));
    }
    return out;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- ground-state

int cmd_ground_state(int dim, int grid_n, double grid_l, double tol, double identity_tol,
                     const std::string& out, const Config& cfg) {
    Timer timer;
    GroundState gs = make_ground_state(dim, grid_n, grid_l, tol);
    IdentityReport rep = identity_report(gs);

    std::vector<std::vector<double>> rows;
    rows.reserve(gs.grid.n + 1);
    for (int i = 0; i <= gs.grid.n; ++i)
        rows.push_back({gs.grid.r[i], gs.w[i], gs.dw[i], gs.w0[i]});
    const std::string csv = out + "_profile.csv";
    write_csv(csv, {"r", "w", "dw", "w0"}, rows);

    nlohmann::json mj;
    mj["dim"] = dim;
    mj["grid_n"] = gs.grid.n;
    mj["grid_L"] = gs.grid.length;
    mj["w_at_0"] = gs.w[0];
    mj["m1"] = gs.mom.m1;
    mj["m2"] = gs.mom.m2;
    mj["m3"] = gs.mom.m3;
    mj["m4"] = gs.mom.m4;
    mj["g2"] = gs.mom.g2;
    mj["w0sq"] = gs.mom.w0sq;
    mj["ww0"] = gs.mom.ww0;
    mj["w3w0"] = gs.mom.w3w0;
    if (dim == 1) mj["y2"] = gs.mom.y2;
    if (dim == 2) mj["c0"] = gs.mom.c0;
    mj["ode_residual"] = gs.ode_residual;
    mj["identity_defects"] = {{"pohozaev", rep.pohozaev},
                              {"gradient", rep.gradient},
                              {"direct", rep.direct},
                              {"ww0", rep.ww0}};
    const std::string mjs = out + "_moments.json";
    write_json(mjs, mj);

    // dim 1 identities are absolute (closed forms); dim 2 relative to m2
    const double scale = (dim == 1) ? 1.0 : gs.mom.m2;
    const bool pass = rep.worst_abs() <= identity_tol * scale;
    std::printf("identity suite: worst defect %.3e (tol %.3e%s) -> %s\n", rep.worst_abs(),
                identity_tol * scale, dim == 1 ? "" : " rel*m2", pass ? "pass" : "FAIL");

    RunManifest man;
    man.command = "ground-state";
    man.config = cfg;
    man.outputs = {csv, mjs};
    man.checks["identity_suite"] = pass;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------- nlep

struct NlepSetup {
    GroundState gs;
    LinearizedOperator op;
};

NlepSetup nlep_setup(int dim, int grid_n, double grid_l, double tol) {
    GroundState gs = make_ground_state(dim, grid_n, grid_l, tol);
    LinearizedOperator op = LinearizedOperator::assemble(gs);
    return {std::move(gs), std::move(op)};
}

int cmd_nlep_scan(int dim, int grid_n, double grid_l, double tau_lo, double tau_hi, int steps,
                  double seed_re, double seed_im, const std::string& out, const Config& cfg) {
    Timer timer;
    NlepSetup s = nlep_setup(dim, grid_n, grid_l, 1e-8);
    NlepProblem p(s.gs, s.op, tau_lo);
    Complex seed{seed_re, seed_im};
    if (seed == Complex{0.0, 0.0}) seed = asymptotic_seed(p, tau_lo);
    EigenBranch br = scan_branch(p, tau_lo, tau_hi, steps, seed);

    std::vector<std::vector<double>> rows;
    for (const auto& pt : br.points)
        rows.push_back({pt.tau_tilde, pt.lambda.real(), pt.lambda.imag(), pt.abs_F});
    const std::string csv = out + "_branch.csv";
    write_csv(csv, {"tau_tilde", "re_lambda", "im_lambda", "abs_F"}, rows);

    std::printf("branch: %zu points, %d Re-sign changes%s\n", br.points.size(),
                br.re_sign_changes, br.aborted ? " (aborted)" : "");

    RunManifest man;
    man.command = "nlep scan";
    man.config = cfg;
    man.outputs = {csv};
    man.checks["branch_complete"] = !br.aborted;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return br.aborted ? 1 : 0;
}

int cmd_nlep_hopf(int dim, int grid_n, double grid_l, double tau_lo, double tau_hi,
                  const std::string& out, const Config& cfg) {
    Timer timer;
    NlepSetup s = nlep_setup(dim, grid_n, grid_l, 1e-8);
    NlepProblem p(s.gs, s.op, tau_hi);
    HopfResult h = find_hopf(p, tau_lo, tau_hi);
    std::printf("tau_tilde_h = %s\n", fmt17(h.tau_h).c_str());
    std::printf("lambda_h    = %s + %s i\n", fmt17(h.lambda_h.real()).c_str(),
                fmt17(h.lambda_h.imag()).c_str());

    nlohmann::json j;
    j["dim"] = dim;
    j["tau_tilde_h"] = h.tau_h;
    j["lambda_h_re"] = h.lambda_h.real();
    j["lambda_h_im"] = h.lambda_h.imag();
    j["branch_steps"] = h.branch_steps;
    const std::string js = out + "_hopf.json";
    write_json(js, j);

    RunManifest man;
    man.command = "nlep hopf";
    man.config = cfg;
    man.outputs = {js};
    man.checks["hopf_found"] = true;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return 0;
}

int cmd_nlep_asymptotics(int dim, int grid_n, double grid_l, const std::vector<double>& taus,
                         const std::string& out, const Config& cfg) {
    Timer timer;
    NlepSetup s = nlep_setup(dim, grid_n, grid_l, 1e-8);
    NlepProblem p(s.gs, s.op, taus.front());
    AsymptoticsReport rep = asymptotic_checks(p, taus);

    nlohmann::json j;
    j["dim"] = dim;
    j["mu0"] = rep.mu0;
    j["mu_next"] = rep.mu_next;
    j["w2_projection"] = rep.w2_projection;
    j["no_invisible_rhp_mode"] = rep.no_invisible_rhp_mode;
    if (dim == 2) j["c0"] = rep.c0_ref;
    if (dim == 1) {
        j["re_tau_limit"] = rep.re_limit_ref;
        j["im_sqrt_tau_limit"] = rep.im_limit_ref;
    }
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : rep.entries) {
        nlohmann::json je;
        je["tau_tilde"] = e.tau_tilde;
        je["re_lambda"] = e.lambda.real();
        je["im_lambda"] = e.lambda.imag();
        je["abs_F"] = e.abs_F;
        if (dim == 2) {
            je["mod_ratio"] = e.mod_ratio;
            je["arg_error"] = e.arg_error;
            std::printf("tau=%g: lambda = %s + %s i  |l|^3 tau/c0=%.6f  arg-pi/3=%+.6f\n",
                        e.tau_tilde, fmt17(e.lambda.real()).c_str(),
                        fmt17(e.lambda.imag()).c_str(), e.mod_ratio, e.arg_error);
        } else {
            je["im_scaled"] = e.im_scaled;
            je["re_scaled"] = e.re_scaled;
            std::printf("tau=%g: lambda = %s + %s i  Im*sqrt(tau)=%.7f  Re*tau=%.7f\n",
                        e.tau_tilde, fmt17(e.lambda.real()).c_str(),
                        fmt17(e.lambda.imag()).c_str(), e.im_scaled, e.re_scaled);
        }
        entries.push_back(je);
    }
    j["entries"] = entries;
    const std::string js = out + "_asymptotics.json";
    write_json(js, j);

    RunManifest man;
    man.command = "nlep asymptotics";
    man.config = cfg;
    man.outputs = {js};
    man.checks["all_roots_converged"] = true;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return 0;
}

// -------------------------------------------------------------------- steady

int cmd_steady(ModelParams par, int phys_n, const std::string& sweep_d0,
               const std::string& sweep_eps, const std::string& out, const Config& cfg) {
    Timer timer;
    GroundState gs = make_ground_state(par.dim);
    SteadySystem sys(par, phys_n);
    auto [u0v, v0s] = sys.build_approximate(gs);
    SteadyStateSolution sol = sys.newton_solve(u0v, v0s);
    SteadyDiagnostics diag = diagnostics(sys, sol.u, sol.v, gs);

    std::vector<std::vector<double>> rows;
    const double en = par.eps_n();
    for (int i = 0; i <= sol.grid.n; ++i)
        rows.push_back({sol.grid.r[i], sol.u[i], sol.v[i], sol.u[i] / en, sol.v[i] * en});
    const std::string csv = out + "_profile.csv";
    write_csv(csv, {"r", "u", "v", "A", "V"}, rows);

    nlohmann::json j;
    j["params"] = {{"dim", par.dim},       {"alpha0", par.alpha0}, {"gamma0", par.gamma0},
                   {"R", par.radius},      {"eps", par.eps},       {"D0", par.d0},
                   {"tau", par.tau}};
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["mass_defect"] = sol.mass_defect;
    j["u_at_0"] = sol.u[0];
    j["v_at_0"] = sol.v[0];
    j["v0"] = par.v0(gs.mom);
    j["v0_gap"] = diag.v0_gap;
    j["u0_predicted"] = diag.u0_predicted;
    j["s_norm_approx"] = diag.s_norm;
    j["flatness_const"] = diag.flatness_const;
    j["phi_star"] = diag.phi_star;
    j["phi_star_over_eps_n"] = diag.phi_star_over_eps_n;
    j["phi_sup_C"] = diag.phi_sup_C;

    // optional scaling sweeps
    if (!sweep_d0.empty()) {
        const std::vector<double> d0s = parse_list(sweep_d0);
        std::vector<double> gaps;
        ModelParams pref = par;
        pref.d0 = 1e8;
        SteadySystem sref(pref, phys_n);
        auto [ur, vr] = sref.build_approximate(gs);
        const double vref = sref.newton_solve(ur, vr).v[0];
        nlohmann::json sweep = nlohmann::json::array();
        for (double d0 : d0s) {
            ModelParams q = par;
            q.d0 = d0;
            SteadySystem sq(q, phys_n);
            auto [uq, vq] = sq.build_approximate(gs);
            SteadyStateSolution sq_sol = sq.newton_solve(uq, vq);
            gaps.push_back(std::abs(sq_sol.v[0] - vref));
            sweep.push_back({{"D0", d0}, {"v_at_0", sq_sol.v[0]},
                             {"gap_to_limit", gaps.back()},
                             {"v0_gap", sq_sol.v[0] - par.v0(gs.mom)}});
        }
        j["d0_sweep"] = sweep;
        j["d0_exponent"] = fit_exponent(d0s, gaps);
        j["v_limit_ref"] = vref;
    }
    if (!sweep_eps.empty()) {
        const std::vector<double> es = parse_list(sweep_eps);
        std::vector<double> norms;
        nlohmann::json sweep = nlohmann::json::array();
        for (double e : es) {
            ModelParams q = par;
            q.eps = e;
            SteadySystem sq(q);
            auto [uq, vq] = sq.build_approximate(gs);
            const std::vector<double> su = sq.residual_u(uq, vq.full());
            const double sn = star2_norm(q, sq.grid(), su);
            norms.push_back(sn);
            sweep.push_back({{"eps", e}, {"s_norm", sn}});
        }
        j["eps_sweep"] = sweep;
        j["eps_exponent"] = fit_exponent(es, norms);
    }
    const std::string js = out + "_summary.json";
    write_json(js, j);

    std::printf("steady: %d iterations, residual %.3e, u(0)=%.8f, v(0)=%.8f (v0=%.8f)\n",
                sol.iterations, sol.residual, sol.u[0], sol.v[0], par.v0(gs.mom));

    RunManifest man;
    man.command = "steady";
    man.config = cfg;
    man.outputs = {csv, js};
    man.checks["newton_converged"] = sol.residual < 1e-10;
    man.checks["mass_balance"] = std::abs(sol.mass_defect) < 1e-10;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return (sol.residual < 1e-10 && std::abs(sol.mass_defect) < 1e-10) ? 0 : 1;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(ModelParams par, double tau_tilde, double t_end, double dt, double perturb,
                 int phys_n, const std::string& out, const Config& cfg) {
    Timer timer;
    GroundState gs = make_ground_state(par.dim);
    if (tau_tilde > 0.0) par.tau = ModelParams::tau_from_tau_tilde(tau_tilde, par, gs.mom);
    if (par.tau <= 0.0) throw grid_error("simulate: need --tau or --tau-tilde positive");

    SteadySystem sys(par, phys_n);
    auto [ua, va] = sys.build_approximate(gs);
    SteadyStateSolution sol = sys.newton_solve(ua, va);

    SimConfig sim;
    sim.params = par;
    sim.dt = dt;
    sim.t_end = t_end;
    sim.n_phys = phys_n;
    SimState s0 = perturbed_state(sys.grid(), sol.u, sol.v, par.eps, perturb);
    RunSummary sum = run_simulation(sim, s0, sol.u[0]);

    std::vector<std::vector<double>> rows;
    for (const auto& tp : sum.trajectory) rows.push_back({tp.t, tp.u0, tp.v0, tp.amp});
    const std::string csv = out + "_timeseries.csv";
    write_csv(csv, {"t", "u0", "v0", "amp"}, rows);

    nlohmann::json j;
    j["sigma"] = sum.sigma;
    j["omega"] = sum.omega;
    j["peaks_used"] = sum.peaks_used;
    j["oscillatory"] = sum.oscillatory;
    j["max_deviation"] = sum.max_deviation;
    j["u0_ref"] = sum.u0_ref;
    j["verdict"] = sum.verdict;
    j["tau"] = par.tau;
    j["tau_tilde"] = par.tau_tilde(gs.mom);
    const std::string js = out + "_summary.json";
    write_json(js, j);

    std::printf("simulate: sigma=%.5f omega=%.5f verdict=%s (peaks %d, max dev %.3f)\n",
                sum.sigma, sum.omega, sum.verdict.c_str(), sum.peaks_used, sum.max_deviation);

    RunManifest man;
    man.command = "simulate";
    man.config = cfg;
    man.outputs = {csv, js};
    man.checks["completed"] = true;
    man.wall_seconds = timer.seconds();
    write_json(out + "_manifest.json", man.to_json());
    return 0;
}

// --------------------------------------------------------- verify-identities

int cmd_verify_identities(int dim, int grid_n, double grid_l, double tol) {
    GroundState gs = make_ground_state(dim, grid_n, grid_l, 1e-8);
    IdentityReport rep = identity_report(gs);
    const double scale = (dim == 1) ? 1.0 : gs.mom.m2;
    bool pass = true;
    auto line = [&](const char* name, double defect) {
        const bool ok = std::abs(defect) <= tol * scale;
        pass = pass && ok;
        std::printf("  %-28s %+.6e  %s\n", name, defect, ok ? "pass" : "FAIL");
    };
    std::printf("identities (dim %d, n %d, L %g, tol %g%s):\n", dim, grid_n, grid_l, tol,
                dim == 1 ? "" : " rel*m2");
    line("int w^4 - 4/(4-N) int w^2", rep.pohozaev);
    line("int |grad w|^2 - N/(4-N) m2", rep.gradient);
    line("int w - int w^3", rep.direct);
    line("int w w0 - (1/2-N/4) m2", rep.ww0);
    if (dim == 1) {
        const double y2 = appendix_integral(gs);
        std::printf("  int y^2 w_y^2 = %s\n", fmt17(y2).c_str());
    }
    std::printf("identity suite: %s\n", pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

// --------------------------------------------------------------- config glue

// flat key=value file; explicit command-line flags win
void apply_config_file(CLI::App* cmd, const std::string& path) {
    const Config file_cfg = parse_config_file(path);
    for (const auto& [key, value] : file_cfg) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

Config resolved_config(CLI::App* cmd) {
    Config cfg;
    for (const CLI::Option* opt : cmd->get_options()) {
        const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
        if (name.empty() || name == "config" || name == "help") continue;
        if (!opt->results().empty())
            cfg[name] = opt->results().front();
        else
            cfg[name] = opt->get_default_str();
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hotspot: radial spike steady states of the crime chemotaxis model, "
                 "their nonlocal eigenvalue problem, and time integration"};
    app.require_subcommand(1);

    // ---- ground-state ----
    auto* gsc = app.add_subcommand("ground-state", "solve the radial ground state and moments");
    int gs_dim = 1, gs_n = 4000;
    double gs_l = 20.0, gs_tol = 1e-8, gs_itol = -1.0;
    std::string gs_out = "hotspot_ground", gs_cfgfile;
    gsc->add_option("--dim", gs_dim, "space dimension")->check(CLI::IsMember({1, 2}));
    gsc->add_option("--grid-n", gs_n, "grid intervals")->capture_default_str();
    gsc->add_option("--grid-L", gs_l, "truncation radius")->capture_default_str();
    gsc->add_option("--tol", gs_tol, "solver tolerance")->capture_default_str();
    gsc->add_option("--identity-tol", gs_itol,
                    "identity tolerance (default 1e-6 abs for dim 1, 1e-3 rel for dim 2)");
    gsc->add_option("--out", gs_out, "output prefix")->capture_default_str();
    gsc->add_option("--config", gs_cfgfile, "flat key=value config file");

    // ---- nlep ----
    auto* nl = app.add_subcommand("nlep", "nonlocal eigenvalue problem tools");
    nl->require_subcommand(1);
    int nl_dim = 2, nl_n = 4000, nl_steps = 120;
    double nl_l = 20.0, nl_tlo = 1.0, nl_thi = 1e4, nl_sre = 0.0, nl_sim = 0.0;
    std::string nl_out = "hotspot_nlep", nl_taus = "100,1000,10000", nl_cfgfile;
    auto* nsc = nl->add_subcommand("scan", "track an eigenvalue branch over tau_tilde");
    auto* nhc = nl->add_subcommand("hopf", "locate the Hopf crossing");
    auto* nac = nl->add_subcommand("asymptotics", "large-tau checks");
    for (CLI::App* c : {nsc, nhc, nac}) {
        c->add_option("--dim", nl_dim, "space dimension")->check(CLI::IsMember({1, 2}));
        c->add_option("--grid-n", nl_n, "grid intervals")->capture_default_str();
        c->add_option("--grid-L", nl_l, "truncation radius")->capture_default_str();
        c->add_option("--out", nl_out, "output prefix")->capture_default_str();
        c->add_option("--config", nl_cfgfile, "flat key=value config file");
    }
    nsc->add_option("--tau-lo", nl_tlo, "low end of the tau range")->capture_default_str();
    nsc->add_option("--tau-hi", nl_thi, "high end of the tau range")->capture_default_str();
    nsc->add_option("--steps", nl_steps, "geometric steps")->capture_default_str();
    nsc->add_option("--seed-re", nl_sre, "real part of the seed (0: asymptotic seed)");
    nsc->add_option("--seed-im", nl_sim, "imag part of the seed");
    nhc->add_option("--tau-lo", nl_tlo, "bracket low end")->capture_default_str();
    nhc->add_option("--tau-hi", nl_thi, "bracket high end")->capture_default_str();
    nac->add_option("--tau", nl_taus, "comma-separated tau_tilde values")->capture_default_str();

    // ---- steady ----
    auto* stc = app.add_subcommand("steady", "coupled steady-state Newton solve");
    ModelParams st_par;
    int st_physn = 0;
    std::string st_out = "hotspot_steady", st_sweep_d0, st_sweep_eps, st_cfgfile;
    stc->add_option("--dim", st_par.dim, "space dimension")->check(CLI::IsMember({1, 2}));
    stc->add_option("--eps", st_par.eps, "diffusion scale")->capture_default_str();
    stc->add_option("--D0", st_par.d0, "v-diffusion strength D0")->capture_default_str();
    stc->add_option("--R", st_par.radius, "ball radius")->capture_default_str();
    stc->add_option("--alpha0", st_par.alpha0, "intrinsic attractiveness")->capture_default_str();
    stc->add_option("--gamma0", st_par.gamma0, "offender introduction rate")->capture_default_str();
    stc->add_option("--tau", st_par.tau, "reaction-time ratio")->capture_default_str();
    stc->add_option("--phys-n", st_physn, "physical grid intervals (0: 40 R/eps)");
    stc->add_option("--sweep-d0", st_sweep_d0, "comma-separated D0 values for the scaling sweep");
    stc->add_option("--sweep-eps", st_sweep_eps, "comma-separated eps values for the residual sweep");
    stc->add_option("--out", st_out, "output prefix")->capture_default_str();
    stc->add_option("--config", st_cfgfile, "flat key=value config file");

    // ---- simulate ----
    auto* smc = app.add_subcommand("simulate", "IMEX time integration of a perturbed spike");
    ModelParams sm_par;
    double sm_tt = 0.0, sm_T = 25.0, sm_dt = 5e-3, sm_pert = 0.01;
    int sm_physn = 0;
    std::string sm_out = "hotspot_sim", sm_cfgfile;
    smc->add_option("--dim", sm_par.dim, "space dimension")->check(CLI::IsMember({1, 2}));
    smc->add_option("--eps", sm_par.eps, "diffusion scale")->capture_default_str();
    smc->add_option("--D0", sm_par.d0, "v-diffusion strength D0")->capture_default_str();
    smc->add_option("--R", sm_par.radius, "ball radius")->capture_default_str();
    smc->add_option("--alpha0", sm_par.alpha0, "intrinsic attractiveness")->capture_default_str();
    smc->add_option("--gamma0", sm_par.gamma0, "offender introduction rate")->capture_default_str();
    smc->add_option("--tau", sm_par.tau, "reaction-time ratio");
    smc->add_option("--tau-tilde", sm_tt, "rescaled reaction-time ratio (overrides --tau)");
    smc->add_option("--T", sm_T, "end time")->capture_default_str();
    smc->add_option("--dt", sm_dt, "time step")->capture_default_str();
    smc->add_option("--perturb", sm_pert, "relative bump amplitude")->capture_default_str();
    smc->add_option("--phys-n", sm_physn, "physical grid intervals (0: 40 R/eps)");
    smc->add_option("--out", sm_out, "output prefix")->capture_default_str();
    smc->add_option("--config", sm_cfgfile, "flat key=value config file");

    // ---- verify-identities ----
    auto* vic = app.add_subcommand("verify-identities", "run the moment identity suite");
    int vi_dim = 1, vi_n = 4000;
    double vi_l = 20.0, vi_tol = 1e-6;
    std::string vi_cfgfile;
    vic->add_option("--dim", vi_dim, "space dimension")->check(CLI::IsMember({1, 2}));
    vic->add_option("--grid-n", vi_n, "grid intervals")->capture_default_str();
    vic->add_option("--grid-L", vi_l, "truncation radius")->capture_default_str();
    vic->add_option("--tol", vi_tol, "identity tolerance")->capture_default_str();
    vic->add_option("--config", vi_cfgfile, "flat key=value config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gsc->parsed()) {
            if (!gs_cfgfile.empty()) apply_config_file(gsc, gs_cfgfile);
            if (gs_itol < 0) gs_itol = (gs_dim == 1) ? 1e-6 : 1e-3;
            return cmd_ground_state(gs_dim, gs_n, gs_l, gs_tol, gs_itol, gs_out,
                                    resolved_config(gsc));
        }
        if (nl->parsed()) {
            CLI::App* sub = nsc->parsed() ? nsc : (nhc->parsed() ? nhc : nac);
            if (!nl_cfgfile.empty()) apply_config_file(sub, nl_cfgfile);
            if (nsc->parsed())
                return cmd_nlep_scan(nl_dim, nl_n, nl_l, nl_tlo, nl_thi, nl_steps, nl_sre, nl_sim,
                                     nl_out, resolved_config(nsc));
            if (nhc->parsed())
                return cmd_nlep_hopf(nl_dim, nl_n, nl_l, nl_tlo, nl_thi, nl_out,
                                     resolved_config(nhc));
            return cmd_nlep_asymptotics(nl_dim, nl_n, nl_l, parse_list(nl_taus), nl_out,
                                        resolved_config(nac));
        }
        if (stc->parsed()) {
            if (!st_cfgfile.empty()) apply_config_file(stc, st_cfgfile);
            return cmd_steady(st_par, st_physn, st_sweep_d0, st_sweep_eps, st_out,
                              resolved_config(stc));
        }
        if (smc->parsed()) {
            if (!sm_cfgfile.empty()) apply_config_file(smc, sm_cfgfile);
            return cmd_simulate(sm_par, sm_tt, sm_T, sm_dt, sm_pert, sm_physn, sm_out,
                                resolved_config(smc));
        }
        if (vic->parsed()) {
            if (!vi_cfgfile.empty()) apply_config_file(vic, vi_cfgfile);
            return cmd_verify_identities(vi_dim, vi_n, vi_l, vi_tol);
        }
    } catch (const bracket_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
