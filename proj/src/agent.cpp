#include "fireseg/agent.hpp"

#include "fireseg/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace fireseg {

void validate(const AgentConfig& cfg) {
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0))
        throw std::invalid_argument("AgentConfig: gamma must be in [0,1)");
    if (cfg.quant_levels < 2 || cfg.quant_levels > 65535)
        throw std::invalid_argument("AgentConfig: quant_levels must be in [2,65535]");
    if (cfg.lookahead_depth < 1)
        throw std::invalid_argument("AgentConfig: lookahead_depth must be >= 1");
}

StateKey quantize_state(const Feature& feature, int quant_levels) {
    StateKey key;
    for (std::size_t i = 0; i < feature.size(); ++i) {
        long bin = static_cast<long>(std::floor(feature[i] * quant_levels));
        bin = std::clamp(bin, 0L, static_cast<long>(quant_levels) - 1);
        key.bins[i] = static_cast<std::uint16_t>(bin);
    }
    return key;
}

const QEntry* QTable::find(const StateKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

QEntry* QTable::find(const StateKey& key) {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void QTable::record(const StateKey& key, const QEntry& entry) { entries_[key] = entry; }

namespace {

constexpr int kQTableVersion = 1;
constexpr const char* kQTableFormat = "fireseg-qtable";

} // namespace

void QTable::save(const std::filesystem::path& path, const AgentConfig& cfg) const {
    nlohmann::ordered_json j;
    j["format"] = kQTableFormat;
    j["version"] = kQTableVersion;
    j["gamma"] = cfg.gamma;
    j["quant_levels"] = cfg.quant_levels;
    j["lookahead_depth"] = cfg.lookahead_depth;
    auto items = nlohmann::ordered_json::array();
    for (const auto& [key, e] : entries_) {
        items.push_back({{"key", key.bins},
                         {"q_include", e.q_include},
                         {"q_exclude", e.q_exclude},
                         {"action", e.chosen == Action::include ? "include" : "exclude"},
                         {"visits", e.visits}});
    }
    j["entries"] = std::move(items);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

QTable QTable::load(const std::filesystem::path& path, const AgentConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open Q-table: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed Q-table " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kQTableFormat)
        throw std::runtime_error("not a Q-table file: " + path.string());
    if (j.value("version", -1) != kQTableVersion)
        throw std::runtime_error("unsupported Q-table version in " + path.string());
    if (j.value("quant_levels", -1) != cfg.quant_levels ||
        j.value("gamma", -1.0) != cfg.gamma ||
        j.value("lookahead_depth", -1) != cfg.lookahead_depth)
        throw std::runtime_error("Q-table " + path.string() +
                                 " was trained under a different agent configuration");

    QTable qt;
    for (const auto& item : j.at("entries")) {
        StateKey key;
        const auto& bins = item.at("key");
        if (bins.size() != key.bins.size())
            throw std::runtime_error("malformed Q-table key in " + path.string());
        for (std::size_t i = 0; i < key.bins.size(); ++i) key.bins[i] = bins[i].get<std::uint16_t>();

        QEntry e;
        e.q_include = item.at("q_include").get<double>();
        e.q_exclude = item.at("q_exclude").get<double>();
        const std::string action = item.at("action").get<std::string>();
        if (action == "include")
            e.chosen = Action::include;
        else if (action == "exclude")
            e.chosen = Action::exclude;
        else
            throw std::runtime_error("malformed Q-table action in " + path.string());
        e.visits = item.at("visits").get<std::uint64_t>();
        qt.entries_[key] = e;
    }
    return qt;
}

void FireModel::absorb(const Granule& g) {
    const auto added = static_cast<std::uint64_t>(g.size());
    if (added == 0) return;
    const double total = static_cast<double>(pixel_count) + static_cast<double>(added);
    for (std::size_t k = 0; k < mean_feature.size(); ++k)
        mean_feature[k] = (mean_feature[k] * static_cast<double>(pixel_count) +
                           g.mean_feature[k] * static_cast<double>(added)) /
                          total;
    pixel_count += added;
}

double reward(const FireModel& model, const Granule& g) {
    if (!model.defined()) throw std::logic_error("no fire model");
    double sq = 0.0;
    for (std::size_t k = 0; k < model.mean_feature.size(); ++k) {
        const double d = model.mean_feature[k] - g.mean_feature[k];
        sq += d * d;
    }
    const double dist = std::sqrt(sq / 6.0); // normalized Euclidean distance, in [0,1]
    return 1.0 - 2.0 * dist;
}

namespace {

// Lowest-id candidate adjacent to g, skipping the lookahead chain.
int successor_toward(const BoundaryWalkView& v, int g, const std::vector<std::uint8_t>& chain) {
    for (int h : v.adjacency[g])
        if (v.candidate[h] && !chain[h]) return h;
    return -1;
}

// Lowest-id candidate adjacent to the current fire set, skipping the chain.
int successor_outward(const BoundaryWalkView& v, const std::vector<std::uint8_t>& chain) {
    for (std::size_t h = 0; h < v.candidate.size(); ++h)
        if (v.candidate[h] && v.lower_adjacent[h] && !chain[h])
            return static_cast<int>(h);
    return -1;
}

double evaluate_reward(const BoundaryWalkView& v, int g, const FireModel& model,
                       std::uint64_t* reward_evals) {
    if (reward_evals) ++*reward_evals;
    return reward(model, v.granules[g]);
}

// V(g, depth): R(g) at depth 0, otherwise the better of the two
// action values expanded one successor further down the chain.
double chain_value(const BoundaryWalkView& v, int g, const FireModel& model, double gamma,
                   int depth, std::vector<std::uint8_t>& chain, std::uint64_t* reward_evals) {
    const double r = evaluate_reward(v, g, model, reward_evals);
    if (depth == 0) return r;
    chain[g] = 1;
    const int s1 = successor_toward(v, g, chain);
    const int s2 = successor_outward(v, chain);
    const double qi =
        s1 >= 0 ? r + gamma * chain_value(v, s1, model, gamma, depth - 1, chain, reward_evals) : r;
    const double qx =
        s2 >= 0 ? r + gamma * chain_value(v, s2, model, gamma, depth - 1, chain, reward_evals) : r;
    chain[g] = 0;
    return std::max(qi, qx);
}

} // namespace

QPair q_pair(const BoundaryWalkView& view, int granule_id, const FireModel& model,
             const AgentConfig& cfg, std::uint64_t* reward_evals) {
    QPair q;
    q.self_reward = evaluate_reward(view, granule_id, model, reward_evals);

    std::vector<std::uint8_t> chain(view.granules.size(), 0);
    chain[granule_id] = 1;
    const int s1 = successor_toward(view, granule_id, chain);
    const int s2 = successor_outward(view, chain);
    const int depth = cfg.lookahead_depth - 1;
    q.q_include = s1 >= 0 ? q.self_reward + cfg.gamma * chain_value(view, s1, model, cfg.gamma,
                                                                    depth, chain, reward_evals)
                          : q.self_reward;
    q.q_exclude = s2 >= 0 ? q.self_reward + cfg.gamma * chain_value(view, s2, model, cfg.gamma,
                                                                    depth, chain, reward_evals)
                          : q.self_reward;
    return q;
}

namespace {

// Multi-source BFS distance from the lower approximation over the whole
// granule graph; unreachable granules keep INT_MAX and sort to the end.
std::vector<int> bfs_layers(const GranulatedFrame& gf, const std::vector<int>& sources) {
    std::vector<int> layer(gf.granule_count(), std::numeric_limits<int>::max());
    std::deque<int> queue;
    for (int id : sources) {
        layer[id] = 0;
        queue.push_back(id);
    }
    while (!queue.empty()) {
        const int g = queue.front();
        queue.pop_front();
        for (int h : gf.adjacency[g]) {
            if (layer[h] != std::numeric_limits<int>::max()) continue;
            layer[h] = layer[g] + 1;
            queue.push_back(h);
        }
    }
    return layer;
}

} // namespace

RefineResult refine(const GranulatedFrame& gf, const RoughApproximation& ra,
                    const AgentConfig& cfg, QTable& qt) {
    validate(cfg);

    RefineResult res;
    if (ra.lower.empty()) {
        res.no_fire_model = true;
        return res;
    }

    const std::size_t n = gf.granule_count();
    std::vector<std::uint8_t> in_fire(n, 0);
    std::vector<std::uint8_t> candidate(n, 0);
    std::vector<std::uint8_t> lower_adjacent(n, 0);

    FireModel model;
    for (int id : ra.lower) {
        in_fire[id] = 1;
        model.absorb(gf.granules[id]);
    }
    for (int id : ra.boundary) candidate[id] = 1;
    for (int id : ra.lower)
        for (int h : gf.adjacency[id]) lower_adjacent[h] = 1;

    const std::vector<int> layer = bfs_layers(gf, ra.lower);
    std::vector<int> order = ra.boundary;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::pair(layer[a], a) < std::pair(layer[b], b); });

    for (int g : order) {
        const StateKey key = quantize_state(gf.granules[g].mean_feature, cfg.quant_levels);
        Action act;
        if (QEntry* known = qt.find(key)) {
            act = known->chosen;
            ++known->visits;
            ++res.known_state_hits;
        } else {
            const BoundaryWalkView view{gf.granules, gf.adjacency, candidate, lower_adjacent};
            const QPair q = q_pair(view, g, model, cfg, &res.reward_evals);
            const bool include = q.q_include > q.q_exclude ||
                                 (q.q_include == q.q_exclude && q.self_reward > 0.0);
            act = include ? Action::include : Action::exclude;
            qt.record(key, {q.q_include, q.q_exclude, act, 1});
        }

        candidate[g] = 0;
        if (act == Action::include) {
            in_fire[g] = 1;
            model.absorb(gf.granules[g]);
            for (int h : gf.adjacency[g]) lower_adjacent[h] = 1;
        }
    }

    for (std::size_t id = 0; id < n; ++id)
        if (in_fire[id]) res.fire.push_back(static_cast<int>(id));
    return res;
}

FrameSegmentation segment_frame(const FrameBuffer& f, const PipelineConfig& cfg, QTable& qt) {
    const FrameStats stats = frame_stats(f);
    const PixelMask mask_y = ycrcb_fire_mask(f, stats);
    const PixelMask mask_r = rgb_fire_mask(f, stats);

    FrameSegmentation out;
    out.granulated = granulate(f, cfg.thr);
    out.approx = approximate_fire(out.granulated, mask_y, mask_r);

    RefineResult refined = refine(out.granulated, out.approx, cfg.agent, qt);
    out.mask = mask_from_granules(out.granulated, refined.fire);
    out.fire_granules = std::move(refined.fire);
    out.no_fire_model = refined.no_fire_model;
    out.reward_evals = refined.reward_evals;
    out.known_state_hits = refined.known_state_hits;
    return out;
}

} // namespace fireseg
