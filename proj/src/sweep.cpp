#include "anct/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace anct {

namespace {

ScenarioConfig cell_config(const SweepSpec& spec, double value, Protocol proto,
                           std::uint64_t seed) {
    ScenarioConfig c = spec.base;
    c.rng_seed = seed;
    c.protocol = proto;
    if (spec.vary == SweepSpec::Vary::attackers)
        c.attacker_count = static_cast<std::uint32_t>(std::llround(value));
    else
        c.speed = value;
    return c;
}

} // namespace

std::vector<RunResult> run_sweep(const SweepSpec& spec, unsigned workers, std::string& err) {
    struct Cell {
        ScenarioConfig cfg;
        double value;
    };
    std::vector<Cell> cells;
    for (double v : spec.values)
        for (Protocol p : spec.protocols)
            for (std::uint64_t s : spec.seeds)
                cells.push_back(Cell{cell_config(spec, v, p, s), v});

    std::vector<RunResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_err;
    std::mutex err_mu;

    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size() || failed.load()) return;
            ValidatedConfig vc;
            std::string e;
            if (!validate_config(cells[i].cfg, vc, e)) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!failed.exchange(true)) first_err = e;
                return;
            }
            try {
                Engine engine(vc);
                Metrics m = engine.run();
                RunResult r;
                r.seed = cells[i].cfg.rng_seed;
                r.protocol = cells[i].cfg.protocol;
                r.attack = cells[i].cfg.attack_kind;
                r.attackers = cells[i].cfg.attacker_count;
                r.speed = cells[i].cfg.speed;
                r.metrics = m;
                results[i] = r;
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!failed.exchange(true)) first_err = ex.what();
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    if (failed.load()) {
        err = first_err;
        return {};
    }
    return results;
}

std::string csv_header() {
    return "seed,protocol,attack,attackers,speed,pdr,mean_delay_ms,ctrl_bytes,"
           "drops_attacker,drops_link,drops_queue,drops_noroute";
}

std::string csv_row(const RunResult& r) {
    char buf[96];
    std::string s;
    s += std::to_string(r.seed);
    s += ',';
    s += to_string(r.protocol);
    s += ',';
    s += to_string(r.attack);
    s += ',';
    s += std::to_string(r.attackers);
    std::snprintf(buf, sizeof buf, ",%.6g", r.speed);
    s += buf;
    std::snprintf(buf, sizeof buf, ",%.6f", r.metrics.pdr());
    s += buf;
    if (auto d = r.metrics.mean_delay_ms()) {
        std::snprintf(buf, sizeof buf, ",%.3f", *d);
        s += buf;
    } else {
        s += ','; // delay is absent, not zero
    }
    s += ',' + std::to_string(r.metrics.control_bytes_sent);
    s += ',' + std::to_string(r.metrics.drops_attacker);
    s += ',' + std::to_string(r.metrics.drops_link);
    s += ',' + std::to_string(r.metrics.drops_queue);
    s += ',' + std::to_string(r.metrics.drops_noroute);
    return s;
}

std::vector<PointSummary> summarize(const SweepSpec& spec, const std::vector<RunResult>& rows) {
    std::vector<PointSummary> out;
    for (double v : spec.values) {
        for (Protocol p : spec.protocols) {
            PointSummary ps;
            ps.value = v;
            ps.protocol = p;
            double sum = 0.0, lo = 1.0, hi = 0.0, bytes = 0.0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                bool match = r.protocol == p &&
                             (spec.vary == SweepSpec::Vary::attackers
                                  ? r.attackers == static_cast<std::uint32_t>(std::llround(v))
                                  : r.speed == v);
                if (!match) continue;
                double pdr = r.metrics.pdr();
                sum += pdr;
                lo = std::min(lo, pdr);
                hi = std::max(hi, pdr);
                bytes += static_cast<double>(r.metrics.control_bytes_sent);
                ++n;
            }
            if (n == 0) continue;
            ps.mean_pdr = sum / static_cast<double>(n);
            ps.min_pdr = lo;
            ps.max_pdr = hi;
            ps.mean_ctrl_bytes = bytes / static_cast<double>(n);
            out.push_back(ps);
        }
    }
    return out;
}

} // namespace anct
