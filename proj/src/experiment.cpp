#include "relayq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "relayq/bit_alloc.hpp"
#include "relayq/errors.hpp"
#include "relayq/version.hpp"

namespace relayq {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int levels_for_bits(int k) {
    if (k > 20)
        throw SpecValidationError("k_max_grid", "a single link was allocated " + std::to_string(k) +
                                                    " bits; per-link budgets above 20 are not supported");
    return (1 << k) - 1;
}

// Proposed quantizer across the level range: closed form for the uniform
// law, kappa-corrected design for general laws, and the exact fixed point
// when N = 1 leaves kappa* degenerate.
QuantizationVector design_proposed(int n_levels, double gamma, const ChannelDistribution& dist) {
    if (dist.kind() == ChannelKind::UniformPower)
        return design_uniform(n_levels, gamma);
    if (n_levels >= 2)
        return design_general(n_levels, gamma, dist);
    return design_fixed_point(n_levels, gamma, dist);
}

// r_1 of the proposed quantizer at a nominal N = 3 (2 bits); eta treats it
// as a constant across the running bit counts.
double nominal_r1(double gamma, const ChannelDistribution& dist) {
    const QuantizationVector q = design_proposed(3, gamma, dist);
    const double r0 = gamma * q.levels[0] + 1.0;
    return 1.0 + std::log(r0);
}

struct CsvWriter {
    explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out)
            throw InvalidInputError("cannot open output file: " + path);
    }
    void header(const std::vector<std::string>& cells) { write(cells); }
    void row(const std::vector<std::string>& cells) {
        write(cells);
        ++n_rows;
    }
    void write(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out << ',';
            out << cells[i];
        }
        out << '\n';
    }
    std::ofstream out;
    int n_rows = 0;  // data rows, header excluded
};

}  // namespace

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::AdaptiveVsFixed: return "AdaptiveVsFixed";
        case Scenario::LossRatioVsSnr: return "LossRatioVsSnr";
        case Scenario::DecayVsN: return "DecayVsN";
        case Scenario::BitAllocationSweep: return "BitAllocationSweep";
        case Scenario::CentralNodeComparison: return "CentralNodeComparison";
        case Scenario::Custom: return "Custom";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    for (Scenario s : {Scenario::AdaptiveVsFixed, Scenario::LossRatioVsSnr, Scenario::DecayVsN,
                       Scenario::BitAllocationSweep, Scenario::CentralNodeComparison,
                       Scenario::Custom})
        if (scenario_name(s) == name)
            return s;
    throw SpecValidationError("scenario", "unknown scenario: " + name);
}

ChannelDistribution DistributionSpec::make() const {
    switch (kind) {
        case Kind::Uniform: return ChannelDistribution::uniform_power();
        case Kind::Rayleigh: return ChannelDistribution::rayleigh_power();
        case Kind::Csv: return ChannelDistribution::from_csv(csv_path);
    }
    return ChannelDistribution::rayleigh_power();
}

std::string DistributionSpec::name() const {
    switch (kind) {
        case Kind::Uniform: return "uniform";
        case Kind::Rayleigh: return "rayleigh";
        case Kind::Csv: return csv_path;
    }
    return "?";
}

namespace {

DistributionSpec parse_dist(const nlohmann::json& j, const std::string& path) {
    DistributionSpec d;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "uniform")
            d.kind = DistributionSpec::Kind::Uniform;
        else if (s == "rayleigh")
            d.kind = DistributionSpec::Kind::Rayleigh;
        else
            throw SpecValidationError(path, "unknown distribution name: " + s);
    } else if (j.is_object() && j.contains("csv") && j.size() == 1) {
        d.kind = DistributionSpec::Kind::Csv;
        d.csv_path = j.at("csv").get<std::string>();
    } else {
        throw SpecValidationError(path, "expected \"uniform\", \"rayleigh\", or {\"csv\": path}");
    }
    return d;
}

nlohmann::json dist_to_json(const DistributionSpec& d) {
    if (d.kind == DistributionSpec::Kind::Csv)
        return nlohmann::json{{"csv", d.csv_path}};
    return d.name();
}

}  // namespace

NetworkConfig NetworkSpec::to_config() const {
    NetworkConfig cfg;
    cfg.n_sources = n_sources;
    cfg.gamma_sr.reserve(gamma_sr_db.size());
    for (double db : gamma_sr_db)
        cfg.gamma_sr.push_back(db_to_linear(db));
    cfg.gamma_rd = gamma_rd_db ? db_to_linear(*gamma_rd_db) : 0.0;
    return cfg;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw SpecValidationError("", "spec must be a JSON object");
    ExperimentSpec spec;
    bool have_distributions = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "scenario") {
            spec.scenario = scenario_from_name(value.get<std::string>());
        } else if (key == "network") {
            NetworkSpec net;
            for (const auto& [nk, nv] : value.items()) {
                if (nk == "n_sources")
                    net.n_sources = nv.get<int>();
                else if (nk == "gamma_sr_db")
                    net.gamma_sr_db = nv.get<std::vector<double>>();
                else if (nk == "gamma_rd_db")
                    net.gamma_rd_db = nv.get<double>();
                else
                    throw SpecValidationError("network." + nk, "unknown key");
            }
            spec.network = std::move(net);
        } else if (key == "distributions") {
            have_distributions = true;
            if (value.is_object() && value.contains("sr")) {
                const auto& sr = value.at("sr");
                if (sr.is_array()) {
                    for (std::size_t i = 0; i < sr.size(); ++i)
                        spec.dist_sr.push_back(parse_dist(sr[i], "distributions.sr[" + std::to_string(i) + "]"));
                } else {
                    spec.dist_sr.push_back(parse_dist(sr, "distributions.sr"));
                }
                if (value.contains("rd"))
                    spec.dist_rd = parse_dist(value.at("rd"), "distributions.rd");
                else
                    spec.dist_rd = spec.dist_sr.front();
                for (const auto& [dk, dv] : value.items())
                    if (dk != "sr" && dk != "rd")
                        throw SpecValidationError("distributions." + dk, "unknown key");
            } else {
                const DistributionSpec d = parse_dist(value, "distributions");
                spec.dist_sr = {d};
                spec.dist_rd = d;
            }
        } else if (key == "snr_grid_db") {
            spec.snr_grid_db = value.get<std::vector<double>>();
        } else if (key == "n_grid") {
            spec.n_grid = value.get<std::vector<int>>();
        } else if (key == "k_max_grid") {
            spec.k_max_grid = value.get<std::vector<int>>();
        } else if (key == "n_trials") {
            spec.n_trials = value.get<std::int64_t>();
        } else if (key == "master_seed") {
            spec.master_seed = value.get<std::uint64_t>();
        } else if (key == "fixed_design_snr_db") {
            spec.fixed_design_snr_db = value.get<double>();
        } else if (key == "r1_override") {
            spec.r1_override = value.get<double>();
        } else {
            throw SpecValidationError(key, "unknown key");
        }
    }
    if (!j.contains("scenario"))
        throw SpecValidationError("scenario", "missing required key");
    if (!have_distributions) {
        // The adaptive-vs-fixed sweep defaults to the uniform law; the
        // network scenarios assume Rayleigh fading.
        const DistributionSpec d{spec.scenario == Scenario::AdaptiveVsFixed
                                     ? DistributionSpec::Kind::Uniform
                                     : DistributionSpec::Kind::Rayleigh,
                                 {}};
        spec.dist_sr = {d};
        spec.dist_rd = d;
    }
    return spec;
}

nlohmann::json ExperimentSpec::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario_name(scenario);
    if (network) {
        nlohmann::json n;
        n["n_sources"] = network->n_sources;
        if (!network->gamma_sr_db.empty())
            n["gamma_sr_db"] = network->gamma_sr_db;
        if (network->gamma_rd_db)
            n["gamma_rd_db"] = *network->gamma_rd_db;
        j["network"] = n;
    }
    nlohmann::json dist;
    if (dist_sr.size() == 1) {
        dist["sr"] = dist_to_json(dist_sr.front());
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& d : dist_sr)
            arr.push_back(dist_to_json(d));
        dist["sr"] = arr;
    }
    dist["rd"] = dist_to_json(dist_rd);
    j["distributions"] = dist;
    if (!snr_grid_db.empty())
        j["snr_grid_db"] = snr_grid_db;
    if (!n_grid.empty())
        j["n_grid"] = n_grid;
    if (!k_max_grid.empty())
        j["k_max_grid"] = k_max_grid;
    j["n_trials"] = n_trials;
    j["master_seed"] = master_seed;
    j["fixed_design_snr_db"] = fixed_design_snr_db;
    if (r1_override)
        j["r1_override"] = *r1_override;
    return j;
}

ChannelDistribution ExperimentSpec::source_dist(int i) const {
    if (dist_sr.empty())
        return ChannelDistribution::rayleigh_power();
    if (dist_sr.size() == 1)
        return dist_sr.front().make();
    return dist_sr.at(static_cast<std::size_t>(i)).make();
}

namespace {

bool scenario_uses_mc(Scenario s) {
    return s == Scenario::LossRatioVsSnr || s == Scenario::BitAllocationSweep ||
           s == Scenario::CentralNodeComparison || s == Scenario::Custom;
}

bool scenario_needs_full_network(Scenario s) {
    return s == Scenario::BitAllocationSweep || s == Scenario::CentralNodeComparison ||
           s == Scenario::Custom;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok)
        throw SpecValidationError(field, what);
}

}  // namespace

std::vector<SpecWarning> validate_spec(const ExperimentSpec& spec) {
    std::vector<SpecWarning> warnings;
    const Scenario s = spec.scenario;

    require(spec.n_trials >= 1, "n_trials", "must be >= 1");
    for (double v : spec.snr_grid_db)
        require(std::isfinite(v), "snr_grid_db", "entries must be finite");
    for (int n : spec.n_grid)
        require(n >= 1, "n_grid", "entries must be >= 1");
    for (int k : spec.k_max_grid) {
        require(k >= 1, "k_max_grid", "entries must be >= 1");
        require(k <= 60, "k_max_grid", "entries above 60 total bits are not supported");
    }
    require(std::isfinite(spec.fixed_design_snr_db), "fixed_design_snr_db", "must be finite");

    if (s == Scenario::AdaptiveVsFixed || s == Scenario::LossRatioVsSnr || s == Scenario::DecayVsN)
        require(!spec.snr_grid_db.empty(), "snr_grid_db", "required for " + scenario_name(s));
    if (s == Scenario::AdaptiveVsFixed || s == Scenario::LossRatioVsSnr ||
        s == Scenario::DecayVsN || s == Scenario::Custom)
        require(!spec.n_grid.empty(), "n_grid", "required for " + scenario_name(s));
    if (s == Scenario::BitAllocationSweep || s == Scenario::CentralNodeComparison)
        require(!spec.k_max_grid.empty(), "k_max_grid", "required for " + scenario_name(s));

    if (s == Scenario::LossRatioVsSnr || scenario_needs_full_network(s)) {
        require(spec.network.has_value(), "network", "required for " + scenario_name(s));
        require(spec.network->n_sources >= 1, "network.n_sources", "must be >= 1");
        if (spec.dist_sr.size() > 1)
            require(static_cast<int>(spec.dist_sr.size()) == spec.network->n_sources,
                    "distributions.sr", "must have one entry per source");
    }
    if (scenario_needs_full_network(s)) {
        require(spec.network->gamma_rd_db.has_value(), "network.gamma_rd_db",
                "required for " + scenario_name(s));
        require(static_cast<int>(spec.network->gamma_sr_db.size()) == spec.network->n_sources,
                "network.gamma_sr_db", "must have one entry per source");
        const int min_k = spec.network->n_sources + 1;
        for (int k : spec.k_max_grid)
            require(k >= min_k, "k_max_grid",
                    "entries must be >= n_sources + 1 = " + std::to_string(min_k));
    }
    if (spec.r1_override)
        require(*spec.r1_override > 1.0, "r1_override", "must exceed 1");

    if (scenario_uses_mc(s) && spec.n_trials < 10000)
        warnings.push_back({"UnderpoweredMC",
                            "n_trials = " + std::to_string(spec.n_trials) +
                                " is low for percent-level Monte Carlo targets"});

    // N = 1 has no kappa*; the sweep scenarios drop it for non-uniform laws.
    const bool general_law = !spec.dist_sr.empty() &&
                             spec.dist_sr.front().kind != DistributionSpec::Kind::Uniform;
    if (general_law &&
        (s == Scenario::AdaptiveVsFixed || s == Scenario::LossRatioVsSnr || s == Scenario::DecayVsN ||
         s == Scenario::Custom)) {
        if (std::find(spec.n_grid.begin(), spec.n_grid.end(), 1) != spec.n_grid.end())
            warnings.push_back({"DegenerateKappa", "n_levels = 1 dropped from n_grid (kappa* "
                                                   "degenerates for non-uniform laws)"});
    }
    return warnings;
}

namespace {

std::vector<int> effective_n_grid(const ExperimentSpec& spec) {
    std::vector<int> grid = spec.n_grid;
    const bool general_law = !spec.dist_sr.empty() &&
                             spec.dist_sr.front().kind != DistributionSpec::Kind::Uniform;
    if (general_law)
        std::erase(grid, 1);
    if (grid.empty())
        throw SpecValidationError("n_grid", "no usable levels remain in the grid");
    return grid;
}

std::vector<int> uniform_bits(int n_links, int k_max) {
    std::vector<int> bits(static_cast<std::size_t>(n_links), k_max / n_links);
    for (int i = 0; i < k_max % n_links; ++i)
        bits[static_cast<std::size_t>(i)] += 1;
    return bits;
}

struct ScenarioContext {
    const ExperimentSpec& spec;
    CsvWriter& csv;
    int n_threads;
    std::string seed_str;
};

void run_adaptive_vs_fixed(ScenarioContext& ctx) {
    const auto& spec = ctx.spec;
    const ChannelDistribution law = spec.source_dist(0);
    const double gamma_ref = db_to_linear(spec.fixed_design_snr_db);
    ctx.csv.header({"scenario", "seed", "snr_db", "n_levels", "quantizer", "delta_nats", "delta_bits"});
    for (int n : effective_n_grid(spec)) {
        const QuantizationVector q_fixed = design_proposed(n, gamma_ref, law);
        for (double snr : spec.snr_grid_db) {
            const double g = db_to_linear(snr);
            const QuantizationVector q_adaptive = design_proposed(n, g, law);
            const double d_adaptive = delta_q(q_adaptive, g, law).delta_q;
            const double d_fixed = delta_q(q_fixed, g, law).delta_q;
            ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, fmt(snr), std::to_string(n),
                         "adaptive", fmt(d_adaptive), fmt(d_adaptive / kLn2)});
            ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, fmt(snr), std::to_string(n),
                         "fixed", fmt(d_fixed), fmt(d_fixed / kLn2)});
        }
    }
}

void run_loss_ratio_rows(ScenarioContext& ctx, int n_levels, double snr_db,
                         const NetworkConfig& cfg, const std::vector<ChannelDistribution>& dists) {
    const auto& spec = ctx.spec;
    const std::size_t n_links = dists.size();
    std::vector<std::optional<QuantizationVector>> q_opt(n_links), q_me(n_links);
    for (std::size_t l = 0; l < n_links; ++l) {
        const double g = l + 1 == n_links ? cfg.gamma_rd : cfg.gamma_sr[l];
        q_opt[l] = design_proposed(n_levels, g, dists[l]);
        q_me[l] = design_max_entropy(n_levels, dists[l]);
    }
    const MonteCarloReport opt =
        monte_carlo_delta(cfg, q_opt, dists, spec.n_trials, spec.master_seed, ctx.n_threads);
    const MonteCarloReport me =
        monte_carlo_delta(cfg, q_me, dists, spec.n_trials, spec.master_seed, ctx.n_threads);
    for (const auto& [name, rep] : {std::pair<const char*, const MonteCarloReport&>{"optimal", opt},
                                    {"max-entropy", me}}) {
        ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, fmt(snr_db),
                     std::to_string(n_levels), name, fmt(rep.mean_delta),
                     fmt(rep.mean_delta / kLn2), fmt(rep.percent_lost), fmt(rep.percent_stderr)});
    }
}

void run_loss_ratio_vs_snr(ScenarioContext& ctx) {
    const auto& spec = ctx.spec;
    const int ns = spec.network->n_sources;
    ctx.csv.header({"scenario", "seed", "snr_db", "n_levels", "quantizer", "delta_nats", "delta_bits",
                 "percent_lost", "stderr"});
    for (int n : effective_n_grid(spec)) {
        for (double snr : spec.snr_grid_db) {
            const double g = db_to_linear(snr);
            NetworkConfig cfg;
            cfg.n_sources = ns;
            cfg.gamma_sr.assign(static_cast<std::size_t>(ns), g);
            cfg.gamma_rd = g;
            std::vector<ChannelDistribution> dists;
            for (int i = 0; i < ns; ++i)
                dists.push_back(spec.source_dist(i));
            dists.push_back(spec.dist_rd.make());
            run_loss_ratio_rows(ctx, n, snr, cfg, dists);
        }
    }
}

void run_decay_vs_n(ScenarioContext& ctx) {
    const auto& spec = ctx.spec;
    const ChannelDistribution law = spec.source_dist(0);
    ctx.csv.header({"scenario", "seed", "snr_db", "n_levels", "delta_nats"});
    for (double snr : spec.snr_grid_db) {
        const double g = db_to_linear(snr);
        for (int n : effective_n_grid(spec)) {
            const double d = delta_q(design_proposed(n, g, law), g, law).delta_q;
            ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, fmt(snr), std::to_string(n),
                         fmt(d)});
        }
    }
}

struct NetworkSetup {
    NetworkConfig cfg;
    std::vector<ChannelDistribution> dists;  // sources then relay
    LossCoefficients eta;
};

NetworkSetup make_network_setup(const ExperimentSpec& spec) {
    NetworkSetup s;
    s.cfg = spec.network->to_config();
    for (int i = 0; i < s.cfg.n_sources; ++i)
        s.dists.push_back(spec.source_dist(i));
    s.dists.push_back(spec.dist_rd.make());
    const double r1 = spec.r1_override
                          ? *spec.r1_override
                          : nominal_r1(s.cfg.gamma_sr.front(), s.dists.front());
    s.eta = loss_coefficients(s.cfg, r1, 1.0);
    return s;
}

std::vector<std::optional<QuantizationVector>> quantizers_for_bits(
    const NetworkSetup& net, const std::vector<int>& bits, bool proposed) {
    std::vector<std::optional<QuantizationVector>> qs(bits.size());
    for (std::size_t l = 0; l < bits.size(); ++l) {
        if (bits[l] == kInfiniteBits)
            continue;  // perfect CSI for this link
        const int n_levels = levels_for_bits(bits[l]);
        const double g = l + 1 == bits.size() ? net.cfg.gamma_rd : net.cfg.gamma_sr[l];
        qs[l] = proposed ? design_proposed(n_levels, g, net.dists[l])
                         : design_max_entropy(n_levels, net.dists[l]);
    }
    return qs;
}

void run_bit_allocation_sweep(ScenarioContext& ctx) {
    const auto& spec = ctx.spec;
    const NetworkSetup net = make_network_setup(spec);
    const int n_links = net.cfg.n_sources + 1;
    ctx.csv.header({"scenario", "seed", "k_max", "allocator", "quantizer", "percent_achieved",
                 "stderr"});
    for (int k_max : spec.k_max_grid) {
        for (const char* allocator : {"greedy", "uniform"}) {
            std::vector<int> bits;
            if (std::string(allocator) == "greedy") {
                const BitAllocation ba = greedy_allocate(net.eta, k_max);
                bits = ba.k_sr;
                bits.push_back(ba.k_rd);
            } else {
                bits = uniform_bits(n_links, k_max);
            }
            for (const char* quantizer : {"proposed", "max-entropy"}) {
                const auto qs =
                    quantizers_for_bits(net, bits, std::string(quantizer) == "proposed");
                const MonteCarloReport rep = monte_carlo_delta(
                    net.cfg, qs, net.dists, spec.n_trials, spec.master_seed, ctx.n_threads);
                ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, std::to_string(k_max),
                             allocator, quantizer, fmt(100.0 - rep.percent_lost),
                             fmt(rep.percent_stderr)});
            }
        }
    }
}

void run_central_node(ScenarioContext& ctx) {
    const auto& spec = ctx.spec;
    const NetworkSetup net = make_network_setup(spec);
    ctx.csv.header({"scenario", "seed", "node", "k_max", "bound_value", "mc_percent_achieved",
                 "stderr"});
    const std::pair<CentralNode, const char*> nodes[] = {{CentralNode::External, "external"},
                                                         {CentralNode::Relay, "relay"},
                                                         {CentralNode::Destination, "destination"}};
    for (const auto& [node, name] : nodes) {
        for (int k_max : spec.k_max_grid) {
            const BitAllocation ba = central_node_variant(net.eta, k_max, node);
            std::vector<int> bits = ba.k_sr;
            bits.push_back(ba.k_rd);
            const auto qs = quantizers_for_bits(net, bits, true);
            const MonteCarloReport rep = monte_carlo_delta(net.cfg, qs, net.dists, spec.n_trials,
                                                           spec.master_seed, ctx.n_threads);
            ctx.csv.row({scenario_name(spec.scenario), ctx.seed_str, name, std::to_string(k_max),
                         fmt(ba.bound_value), fmt(100.0 - rep.percent_lost),
                         fmt(rep.percent_stderr)});
        }
    }
}

void run_custom(ScenarioContext& ctx) {
    // One-off Monte Carlo on the network exactly as configured, swept over
    // the level grid; rows follow the LossRatioVsSnr schema.
    const auto& spec = ctx.spec;
    const NetworkSetup net = make_network_setup(spec);
    ctx.csv.header({"scenario", "seed", "snr_db", "n_levels", "quantizer", "delta_nats", "delta_bits",
                 "percent_lost", "stderr"});
    const double snr_db = *spec.network->gamma_rd_db;
    for (int n : effective_n_grid(spec))
        run_loss_ratio_rows(ctx, n, snr_db, net.cfg, net.dists);
}

std::string csv_filename(Scenario s) {
    switch (s) {
        case Scenario::AdaptiveVsFixed: return "adaptive_vs_fixed.csv";
        case Scenario::LossRatioVsSnr: return "loss_ratio_vs_snr.csv";
        case Scenario::DecayVsN: return "decay_vs_n.csv";
        case Scenario::BitAllocationSweep: return "bit_allocation_sweep.csv";
        case Scenario::CentralNodeComparison: return "central_node_comparison.csv";
        case Scenario::Custom: return "custom.csv";
    }
    return "run.csv";
}

}  // namespace

RunSummary run(const ExperimentSpec& spec, const std::string& out_dir, int n_threads) {
    RunSummary summary;
    summary.warnings = validate_spec(spec);
    if (n_threads < 1)
        throw InvalidInputError("n_threads must be >= 1");

    std::filesystem::create_directories(out_dir);
    const std::string csv_path = (std::filesystem::path(out_dir) / csv_filename(spec.scenario)).string();

    CsvWriter csv(csv_path);
    ScenarioContext ctx{spec, csv, n_threads, std::to_string(spec.master_seed)};
    switch (spec.scenario) {
        case Scenario::AdaptiveVsFixed: run_adaptive_vs_fixed(ctx); break;
        case Scenario::LossRatioVsSnr: run_loss_ratio_vs_snr(ctx); break;
        case Scenario::DecayVsN: run_decay_vs_n(ctx); break;
        case Scenario::BitAllocationSweep: run_bit_allocation_sweep(ctx); break;
        case Scenario::CentralNodeComparison: run_central_node(ctx); break;
        case Scenario::Custom: run_custom(ctx); break;
    }
    csv.out.flush();
    if (!csv.out)
        throw InvalidInputError("failed writing " + csv_path);

    summary.csv_path = csv_path;
    summary.n_rows = csv.n_rows;
    summary.spec_hash = hex64(fnv1a(spec.to_json().dump()));

    nlohmann::json manifest;
    manifest["scenario"] = scenario_name(spec.scenario);
    manifest["spec_hash"] = summary.spec_hash;
    manifest["master_seed"] = spec.master_seed;
    manifest["version"] = kVersion;
    manifest["csv"] = csv_filename(spec.scenario);
    manifest["rows"] = summary.n_rows;
    nlohmann::json warn = nlohmann::json::array();
    for (const auto& w : summary.warnings)
        warn.push_back({{"code", w.code}, {"message", w.message}});
    manifest["warnings"] = warn;

    const std::string manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();
    std::ofstream mf(manifest_path, std::ios::binary);
    mf << manifest.dump(2) << '\n';
    if (!mf)
        throw InvalidInputError("failed writing " + manifest_path);
    summary.manifest_path = manifest_path;
    return summary;
}

}  // namespace relayq
