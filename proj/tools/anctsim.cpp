// anctsim: run single scenarios, experiment sweeps, or config checks
// for the assured-neighbor counter-table MANET simulator.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "anct/config.hpp"
#include "anct/engine.hpp"
#include "anct/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInternal = 2;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string trace_trust_path;
    std::string trace_positions_path;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* app, CommonArgs& a) {
    app->add_option("--config", a.config_path, "scenario file (key = value lines)");
    app->add_option("--set", a.overrides, "override a config field, key=value")
        ->take_all();
    app->add_option("--seed", a.seed, "override rng_seed");
    app->add_option("--out", a.out_path, "write CSV here instead of stdout");
}

bool build_config(const CommonArgs& a, anct::ScenarioConfig& cfg, std::string& err) {
    if (!a.config_path.empty() && !anct::load_config_file(a.config_path, cfg, err)) return false;
    for (const auto& ov : a.overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) {
            err = "--set expects key=value, got '" + ov + "'";
            return false;
        }
        if (!anct::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1), err)) return false;
    }
    if (a.seed) cfg.rng_seed = *a.seed;
    return true;
}

std::unique_ptr<std::ofstream> open_out(const std::string& path, std::ostream*& os) {
    os = &std::cout;
    if (path.empty()) return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (*f) os = f.get();
    return f;
}

bool parse_seed_list(const std::string& text, std::vector<std::uint64_t>& out, std::string& err) {
    // "1..10" or "1,2,3"
    out.clear();
    auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            std::uint64_t a = std::stoull(text.substr(0, dots));
            std::uint64_t b = std::stoull(text.substr(dots + 2));
            for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
        }
    } catch (...) {
        err = "bad seed list '" + text + "'";
        return false;
    }
    if (out.empty()) {
        err = "empty seed list";
        return false;
    }
    return true;
}

anct::EngineOptions trace_options(const CommonArgs& a, std::ofstream& trust_f,
                                  std::ofstream& pos_f) {
    anct::EngineOptions opts;
    if (!a.trace_trust_path.empty()) {
        trust_f.open(a.trace_trust_path);
        trust_f << "time,observer,neighbor,fc,tc,sr,malicious\n";
        opts.hooks.on_trust = [&trust_f](const anct::TrustEvent& ev) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.6f,%u,%u,%llu,%.6f,", ev.time.seconds(),
                          ev.observer, ev.neighbor,
                          static_cast<unsigned long long>(ev.fc),
                          static_cast<double>(ev.tc_units) / 1e6);
            trust_f << buf;
            if (ev.sr_valid) {
                std::snprintf(buf, sizeof buf, "%.6f", ev.sr);
                trust_f << buf;
            }
            trust_f << ',' << (ev.malicious ? 1 : 0) << '\n';
        };
    }
    if (!a.trace_positions_path.empty()) {
        pos_f.open(a.trace_positions_path);
        pos_f << "time,node,x,y\n";
        opts.hooks.on_positions =
            [&pos_f](anct::SimTime t,
                     const std::vector<std::pair<anct::NodeId, anct::Position>>& pos) {
                for (const auto& [n, p] : pos) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "%.6f,%u,%.3f,%.3f\n", t.seconds(), n, p.x,
                                  p.y);
                    pos_f << buf;
                }
            };
    }
    return opts;
}

int cmd_validate(const CommonArgs& a) {
    anct::ScenarioConfig cfg;
    std::string err;
    if (!build_config(a, cfg, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }
    anct::ValidatedConfig vc;
    if (!anct::validate_config(cfg, vc, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }
    std::cout << anct::serialize_config(vc.cfg);
    return kExitOk;
}

int cmd_run(const CommonArgs& a) {
    anct::ScenarioConfig cfg;
    std::string err;
    anct::ValidatedConfig vc;
    if (!build_config(a, cfg, err) || !anct::validate_config(cfg, vc, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }
    try {
        std::ofstream trust_f, pos_f;
        anct::Engine engine(vc, trace_options(a, trust_f, pos_f));
        anct::Metrics m = engine.run();

        anct::RunResult r;
        r.seed = cfg.rng_seed;
        r.protocol = cfg.protocol;
        r.attack = cfg.attack_kind;
        r.attackers = cfg.attacker_count;
        r.speed = cfg.speed;
        r.metrics = m;

        std::ostream* os = nullptr;
        auto sink = open_out(a.out_path, os);
        *os << anct::csv_header() << "\n" << anct::csv_row(r) << "\n";

        std::fprintf(stderr,
                     "sent=%llu delivered=%llu pdr=%.4f drops[attacker=%llu link=%llu "
                     "queue=%llu no_route=%llu] ctrl_bytes=%llu\n",
                     static_cast<unsigned long long>(m.data_sent),
                     static_cast<unsigned long long>(m.data_delivered), m.pdr(),
                     static_cast<unsigned long long>(m.drops_attacker),
                     static_cast<unsigned long long>(m.drops_link),
                     static_cast<unsigned long long>(m.drops_queue),
                     static_cast<unsigned long long>(m.drops_noroute),
                     static_cast<unsigned long long>(m.control_bytes_sent));
        return kExitOk;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return kExitInternal;
    }
}

int run_sweep_cmd(const anct::SweepSpec& spec, const CommonArgs& a) {
    std::string err;
    auto rows = anct::run_sweep(spec, a.workers, err);
    if (rows.empty() && !err.empty()) {
        std::cerr << "sweep failed: " << err << "\n";
        return err.find("internal") != std::string::npos ? kExitInternal : kExitConfig;
    }
    std::ostream* os = nullptr;
    auto sink = open_out(a.out_path, os);
    *os << anct::csv_header() << "\n";
    for (const auto& r : rows) *os << anct::csv_row(r) << "\n";

    auto summary = anct::summarize(spec, rows);
    std::fprintf(stderr, "%-10s %-14s %-9s %-9s %-9s\n",
                 spec.vary == anct::SweepSpec::Vary::attackers ? "attackers" : "speed",
                 "protocol", "mean_pdr", "min_pdr", "max_pdr");
    for (const auto& p : summary) {
        std::fprintf(stderr, "%-10g %-14s %-9.4f %-9.4f %-9.4f\n", p.value,
                     anct::to_string(p.protocol).c_str(), p.mean_pdr, p.min_pdr, p.max_pdr);
    }
    return kExitOk;
}

int cmd_sweep(const CommonArgs& a, const std::string& vary_arg, const std::string& seeds_arg,
              const std::string& protocols_arg) {
    anct::ScenarioConfig cfg;
    std::string err;
    if (!build_config(a, cfg, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }

    anct::SweepSpec spec;
    spec.base = cfg;

    auto eq = vary_arg.find('=');
    if (eq == std::string::npos) {
        std::cerr << "config error: --vary expects attackers=... or speed=...\n";
        return kExitConfig;
    }
    std::string dim = vary_arg.substr(0, eq);
    if (dim == "attackers") spec.vary = anct::SweepSpec::Vary::attackers;
    else if (dim == "speed") spec.vary = anct::SweepSpec::Vary::speed;
    else {
        std::cerr << "config error: unknown vary dimension '" << dim << "'\n";
        return kExitConfig;
    }
    {
        std::stringstream ss(vary_arg.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                spec.values.push_back(std::stod(item));
            } catch (...) {
                std::cerr << "config error: bad vary value '" << item << "'\n";
                return kExitConfig;
            }
        }
    }
    if (spec.values.empty()) {
        std::cerr << "config error: empty vary list\n";
        return kExitConfig;
    }
    if (!parse_seed_list(seeds_arg, spec.seeds, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }
    {
        std::stringstream ss(protocols_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            anct::Protocol p;
            if (!anct::protocol_from_string(item, p)) {
                std::cerr << "config error: unknown protocol '" << item << "'\n";
                return kExitConfig;
            }
            spec.protocols.push_back(p);
        }
    }
    if (spec.protocols.empty()) {
        std::cerr << "config error: empty protocol list\n";
        return kExitConfig;
    }
    return run_sweep_cmd(spec, a);
}

// Canned experiments: delivery ratio vs blackhole attacker count, and
// vs node speed with a fixed attacker population.
int cmd_experiment(const CommonArgs& a, bool vary_attackers) {
    anct::ScenarioConfig cfg;
    std::string err;
    if (!build_config(a, cfg, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitConfig;
    }

    anct::SweepSpec spec;
    spec.base = cfg;
    spec.base.attack_kind = anct::AttackKind::blackhole;
    spec.protocols = {anct::Protocol::anct, anct::Protocol::baseline_aodv};
    spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    if (vary_attackers) {
        spec.vary = anct::SweepSpec::Vary::attackers;
        spec.values = {0, 5, 10, 15, 20, 25};
        spec.base.speed = 10.0;
    } else {
        spec.vary = anct::SweepSpec::Vary::speed;
        spec.values = {10, 20, 30, 40, 50};
        spec.base.attacker_count = 10;
    }
    return run_sweep_cmd(spec, a);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANCT trust-protocol MANET simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, validate_args, e51_args, e52_args;

    auto* run = app.add_subcommand("run", "run one scenario, print one CSV row");
    add_common(run, run_args);
    run->add_option("--trace-trust", run_args.trace_trust_path,
                    "write trust updates CSV (time,observer,neighbor,fc,tc,sr,malicious)");
    run->add_option("--trace-positions", run_args.trace_positions_path,
                    "write node positions CSV per mobility tick");

    auto* sweep = app.add_subcommand("sweep", "cartesian sweep, one CSV row per run");
    add_common(sweep, sweep_args);
    std::string vary_arg, seeds_arg = "1..10", protocols_arg = "anct,baseline_aodv";
    sweep->add_option("--vary", vary_arg, "attackers=0,5,10 or speed=10,20,...")->required();
    sweep->add_option("--seeds", seeds_arg, "seed list: 1..10 or 1,2,3");
    sweep->add_option("--protocols", protocols_arg, "subset of anct,baseline_aodv");
    sweep->add_option("--workers", sweep_args.workers, "parallel runs");

    auto* validate = app.add_subcommand("validate", "check a config and echo it back");
    add_common(validate, validate_args);

    auto* e51 = app.add_subcommand("expt-delivery-vs-attackers",
                                   "blackhole count sweep at fixed speed, 10 seeds");
    add_common(e51, e51_args);
    e51->add_option("--workers", e51_args.workers, "parallel runs");

    auto* e52 = app.add_subcommand("expt-delivery-vs-speed",
                                   "speed sweep at 10 blackholes, 10 seeds");
    add_common(e52, e52_args);
    e52->add_option("--workers", e52_args.workers, "parallel runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, vary_arg, seeds_arg, protocols_arg);
        if (validate->parsed()) return cmd_validate(validate_args);
        if (e51->parsed()) return cmd_experiment(e51_args, true);
        if (e52->parsed()) return cmd_experiment(e52_args, false);
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
