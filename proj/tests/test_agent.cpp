#include "fireseg/agent.hpp"

#include "fireseg/colorspace.hpp"
#include "fireseg/eval.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace fireseg;

namespace {

// Hand-built granule graph: granule i gets `sizes[i]` fake pixels and the
// given mean feature; edges are undirected.
GranulatedFrame make_graph(const std::vector<Feature>& features,
                           const std::vector<std::size_t>& sizes,
                           const std::vector<std::pair<int, int>>& edges) {
    GranulatedFrame gf;
    gf.adjacency.assign(features.size(), {});
    int next_pixel = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        Granule g;
        g.id = static_cast<int>(i);
        g.mean_feature = features[i];
        g.seed_index = next_pixel;
        for (std::size_t k = 0; k < sizes[i]; ++k) g.pixel_indices.push_back(next_pixel++);
        gf.granules.push_back(std::move(g));
    }
    gf.width = next_pixel;
    gf.height = 1;
    gf.pixel_to_granule.assign(next_pixel, -1);
    for (const Granule& g : gf.granules)
        for (int p : g.pixel_indices) gf.pixel_to_granule[p] = g.id;
    for (auto [a, b] : edges) {
        gf.adjacency[a].push_back(b);
        gf.adjacency[b].push_back(a);
    }
    for (auto& n : gf.adjacency) std::sort(n.begin(), n.end());
    return gf;
}

Feature constant_feature(double v) { return {v, v, v, v, v, v}; }

FireModel model_of(const Feature& f, std::uint64_t pixels = 10) {
    FireModel m;
    m.mean_feature = f;
    m.pixel_count = pixels;
    return m;
}

// Composite frame with a guaranteed boundary: a YCrCb+RGB fire rectangle,
// an RGB-only rectangle, and a background that passes neither rule base.
FrameBuffer composite_frame() {
    FrameBuffer f(24, 16, {0, 60, 200});
    for (int y = 4; y < 10; ++y)
        for (int x = 2; x < 10; ++x) f.at(x, y) = {255, 80, 0};
    for (int y = 6; y < 10; ++y)
        for (int x = 12; x < 16; ++x) f.at(x, y) = {120, 100, 90};
    return f;
}

} // namespace

TEST_SUITE_BEGIN("agent");

TEST_CASE("quantize_state bins and clamps") {
    CHECK(quantize_state(constant_feature(0.0), 16).bins[0] == 0);
    CHECK(quantize_state(constant_feature(1.0), 16).bins[0] == 15);
    CHECK(quantize_state(constant_feature(0.999), 16).bins[0] == 15);
    CHECK(quantize_state(constant_feature(0.0625), 16).bins[0] == 1);
    CHECK(quantize_state({0.0, 0.1, 0.2, 0.3, 0.4, 0.5}, 10).bins ==
          std::array<std::uint16_t, 6>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("reward of an identical granule is 1") {
    const auto gf = make_graph({constant_feature(0.4)}, {3}, {});
    CHECK(reward(model_of(constant_feature(0.4)), gf.granules[0]) == doctest::Approx(1.0));
}

TEST_CASE("reward of a maximally distant granule is -1") {
    const auto gf = make_graph({constant_feature(1.0)}, {3}, {});
    CHECK(reward(model_of(constant_feature(0.0)), gf.granules[0]) == doctest::Approx(-1.0));
}

TEST_CASE("reward with one channel off by 0.5") {
    Feature f = constant_feature(0.2);
    f[2] += 0.5;
    const auto gf = make_graph({f}, {1}, {});
    // D = 0.5 / sqrt(6), R = 1 - 2D
    CHECK(reward(model_of(constant_feature(0.2)), gf.granules[0]) ==
          doctest::Approx(0.5917517095361369).epsilon(1e-9));
}

TEST_CASE("reward without a model is an error") {
    const auto gf = make_graph({constant_feature(0.5)}, {1}, {});
    FireModel undefined;
    CHECK_THROWS_WITH_AS(reward(undefined, gf.granules[0]), "no fire model", std::logic_error);
}

TEST_CASE("reward stays in [-1,1] and decreases with distance") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FireModel m = model_of(constant_feature(0.5));
    double prev = 2.0;
    for (int step = 0; step <= 10; ++step) {
        Feature f = constant_feature(0.5);
        f[0] = 0.5 + 0.05 * step; // monotonically increasing distance
        const auto gf = make_graph({f}, {1}, {});
        const double r = reward(m, gf.granules[0]);
        CHECK(r <= 1.0);
        CHECK(r >= -1.0);
        CHECK(r < prev);
        prev = r;
    }
    for (int trial = 0; trial < 100; ++trial) {
        Feature f{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto gf = make_graph({f}, {1}, {});
        const double r = reward(model_of({u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}),
                                gf.granules[0]);
        CHECK(r <= 1.0);
        CHECK(r >= -1.0);
    }
}

TEST_CASE("fire model absorbs granules as a pixel-weighted mean") {
    FireModel m = model_of(constant_feature(0.0), 30);
    const auto gf = make_graph({constant_feature(0.6)}, {10}, {});
    m.absorb(gf.granules[0]);
    CHECK(m.pixel_count == 40);
    CHECK(m.mean_feature[0] == doctest::Approx(0.15)); // 10/40 of the way
}

TEST_CASE("q_pair with no successors returns the bare reward twice") {
    const auto gf = make_graph({constant_feature(0.3)}, {1}, {});
    std::vector<std::uint8_t> candidate{1};
    std::vector<std::uint8_t> lower_adjacent{1};
    const BoundaryWalkView view{gf.granules, gf.adjacency, candidate, lower_adjacent};
    const FireModel m = model_of(constant_feature(0.3));
    const QPair q = q_pair(view, 0, m, {});
    CHECK(q.q_include == doctest::Approx(1.0));
    CHECK(q.q_exclude == doctest::Approx(1.0));
    CHECK(q.self_reward == doctest::Approx(1.0));
}

TEST_CASE("q_pair arithmetic: R=0.5 with successors at R=1 and R=-1") {
    Feature g_feature = constant_feature(0.0);
    g_feature[0] = std::sqrt(0.375); // single-channel distance giving R = 0.5
    const auto gf = make_graph({g_feature, constant_feature(0.0), constant_feature(1.0)},
                               {1, 1, 1}, {{0, 1}});
    std::vector<std::uint8_t> candidate{1, 1, 1};
    std::vector<std::uint8_t> lower_adjacent{0, 0, 1};
    const BoundaryWalkView view{gf.granules, gf.adjacency, candidate, lower_adjacent};
    const FireModel m = model_of(constant_feature(0.0));

    AgentConfig cfg;
    cfg.gamma = 0.9;
    std::uint64_t evals = 0;
    const QPair q = q_pair(view, 0, m, cfg, &evals);
    CHECK(q.self_reward == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(q.q_include == doctest::Approx(1.4).epsilon(1e-9));
    CHECK(q.q_exclude == doctest::Approx(-0.4).epsilon(1e-9));
    CHECK(evals == 3); // self plus one reward per successor
}

namespace {

// Brute-force oracle over tiny graphs, written directly from the rule:
// q_a = R(g) + gamma * V(succ_a), V recursing with no revisits on the chain.
struct TinyGraph {
    int n = 0;
    bool adj[6][6] = {};
    bool candidate[6] = {};
    bool adj_lower[6] = {};
    double node_reward[6] = {};
};

int tiny_succ_toward(const TinyGraph& t, int g, const bool chain[6]) {
    for (int h = 0; h < t.n; ++h)
        if (t.adj[g][h] && t.candidate[h] && !chain[h]) return h;
    return -1;
}

int tiny_succ_outward(const TinyGraph& t, const bool chain[6]) {
    for (int h = 0; h < t.n; ++h)
        if (t.candidate[h] && t.adj_lower[h] && !chain[h]) return h;
    return -1;
}

double tiny_value(const TinyGraph& t, int g, double gamma, int depth, bool chain[6]) {
    const double r = t.node_reward[g];
    if (depth == 0) return r;
    chain[g] = true;
    const int s1 = tiny_succ_toward(t, g, chain);
    const int s2 = tiny_succ_outward(t, chain);
    const double qi = s1 >= 0 ? r + gamma * tiny_value(t, s1, gamma, depth - 1, chain) : r;
    const double qx = s2 >= 0 ? r + gamma * tiny_value(t, s2, gamma, depth - 1, chain) : r;
    chain[g] = false;
    return std::max(qi, qx);
}

std::pair<double, double> tiny_q_pair(const TinyGraph& t, int g, double gamma, int depth) {
    const double r = t.node_reward[g];
    bool chain[6] = {};
    chain[g] = true;
    const int s1 = tiny_succ_toward(t, g, chain);
    const int s2 = tiny_succ_outward(t, chain);
    const double qi = s1 >= 0 ? r + gamma * tiny_value(t, s1, gamma, depth - 1, chain) : r;
    const double qx = s2 >= 0 ? r + gamma * tiny_value(t, s2, gamma, depth - 1, chain) : r;
    return {qi, qx};
}

} // namespace

TEST_CASE("q_pair matches a depth-limited brute-force oracle on tiny graphs") {
    std::mt19937 rng(4711);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> n_pick(2, 6);
    std::uniform_int_distribution<int> depth_pick(1, 3);

    for (int trial = 0; trial < 400; ++trial) {
        const int n = n_pick(rng);
        TinyGraph t;
        t.n = n;

        std::vector<Feature> features;
        std::vector<std::size_t> sizes(n, 1);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            features.push_back({u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)});
            t.candidate[i] = u(rng) < 0.6;
            t.adj_lower[i] = u(rng) < 0.5;
        }
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (u(rng) < 0.5) {
                    t.adj[a][b] = t.adj[b][a] = true;
                    edges.emplace_back(a, b);
                }

        const Feature model_feature{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        for (int i = 0; i < n; ++i) {
            double sq = 0.0;
            for (int k = 0; k < 6; ++k) {
                const double d = model_feature[k] - features[i][k];
                sq += d * d;
            }
            t.node_reward[i] = 1.0 - 2.0 * std::sqrt(sq / 6.0);
        }

        const auto gf = make_graph(features, sizes, edges);
        std::vector<std::uint8_t> candidate(n), lower_adjacent(n);
        for (int i = 0; i < n; ++i) {
            candidate[i] = t.candidate[i];
            lower_adjacent[i] = t.adj_lower[i];
        }
        const BoundaryWalkView view{gf.granules, gf.adjacency, candidate, lower_adjacent};
        const FireModel m = model_of(model_feature);

        AgentConfig cfg;
        cfg.gamma = u(rng) * 0.99;
        cfg.lookahead_depth = depth_pick(rng);

        int g = std::uniform_int_distribution<int>(0, n - 1)(rng);
        t.candidate[g] = true;
        candidate[g] = 1;

        const QPair got = q_pair(view, g, m, cfg);
        const auto [want_qi, want_qx] = tiny_q_pair(t, g, cfg.gamma, cfg.lookahead_depth);
        CHECK(got.q_include == doctest::Approx(want_qi).epsilon(1e-9));
        CHECK(got.q_exclude == doctest::Approx(want_qx).epsilon(1e-9));
    }
}

TEST_CASE("refine with an empty boundary returns the lower set untouched") {
    const auto gf = make_graph({constant_feature(0.5), constant_feature(0.9)}, {4, 4}, {{0, 1}});
    RoughApproximation ra;
    ra.lower = {0};
    ra.upper = {0};
    QTable qt;
    const RefineResult r = refine(gf, ra, {}, qt);
    CHECK(r.fire == std::vector<int>{0});
    CHECK(qt.empty());
    CHECK(r.reward_evals == 0);
    CHECK_FALSE(r.no_fire_model);
}

TEST_CASE("refine with an empty lower approximation flags no fire model") {
    const auto gf = make_graph({constant_feature(0.5), constant_feature(0.9)}, {4, 4}, {{0, 1}});
    RoughApproximation ra;
    ra.upper = {0, 1};
    ra.boundary = {0, 1};
    QTable qt;
    const RefineResult r = refine(gf, ra, {}, qt);
    CHECK(r.fire.empty());
    CHECK(r.no_fire_model);
    CHECK(qt.empty());
}

TEST_CASE("boundary granules identical to the model are all included") {
    const Feature f = constant_feature(0.3);
    const auto gf = make_graph({f, f, f}, {10, 2, 2}, {{0, 1}, {0, 2}, {1, 2}});
    RoughApproximation ra;
    ra.lower = {0};
    ra.upper = {0, 1, 2};
    ra.boundary = {1, 2};
    QTable qt;
    const RefineResult r = refine(gf, ra, {}, qt);
    CHECK(r.fire == std::vector<int>{0, 1, 2});
}

TEST_CASE("boundary walk follows BFS order from the lower set, not id order") {
    // Granule 2 sits next to the lower set; granule 1 is only reachable
    // through 2. A BFS walk must visit 2 first, so 2's include value looks
    // one step ahead at 1 while its exclude value sees no other frontier.
    Feature near = constant_feature(0.2);
    near[0] = 0.3;
    const Feature far = constant_feature(0.9);
    const auto gf =
        make_graph({constant_feature(0.2), far, near}, {100, 1, 1}, {{0, 2}, {2, 1}});
    RoughApproximation ra;
    ra.lower = {0};
    ra.upper = {0, 1, 2};
    ra.boundary = {1, 2};

    const FireModel m = model_of(constant_feature(0.2), 100);
    const double r1 = reward(m, gf.granules[1]); // negative: far from the model
    const double r2 = reward(m, gf.granules[2]);
    REQUIRE(r1 < 0.0);
    REQUIRE(r2 > 0.0);

    AgentConfig cfg;
    QTable qt;
    const RefineResult r = refine(gf, ra, cfg, qt);

    const QEntry* e2 = qt.find(quantize_state(near, cfg.quant_levels));
    REQUIRE(e2 != nullptr);
    CHECK(e2->q_include == doctest::Approx(r2 + cfg.gamma * r1).epsilon(1e-9));
    CHECK(e2->q_exclude == doctest::Approx(r2).epsilon(1e-9));
    CHECK(e2->chosen == Action::exclude); // looking ahead at 1 is a bad deal

    const QEntry* e1 = qt.find(quantize_state(far, cfg.quant_levels));
    REQUIRE(e1 != nullptr);
    CHECK(e1->q_include == doctest::Approx(r1).epsilon(1e-9));
    CHECK(e1->q_exclude == doctest::Approx(r1).epsilon(1e-9));
    CHECK(e1->chosen == Action::exclude);

    CHECK(r.fire == std::vector<int>{0});
}

TEST_CASE("a stored action is replayed even against the fresh evaluation") {
    const Feature f = constant_feature(0.3);
    const auto gf = make_graph({f, f}, {10, 2}, {{0, 1}});
    RoughApproximation ra;
    ra.lower = {0};
    ra.upper = {0, 1};
    ra.boundary = {1};

    AgentConfig cfg;
    QTable qt;
    qt.record(quantize_state(f, cfg.quant_levels), {-1.0, 1.0, Action::exclude, 1});

    const RefineResult r = refine(gf, ra, cfg, qt);
    CHECK(r.fire == std::vector<int>{0}); // identical granule would be included otherwise
    CHECK(r.reward_evals == 0);
    CHECK(r.known_state_hits == 1);
    CHECK(qt.find(quantize_state(f, cfg.quant_levels))->visits == 2);
}

TEST_CASE("second pass over a frame reuses every decision") {
    const FrameBuffer frame = composite_frame();
    PipelineConfig cfg;
    QTable qt;

    const FrameSegmentation first = segment_frame(frame, cfg, qt);
    REQUIRE_FALSE(first.approx.boundary.empty()); // the frame must exercise the walk
    CHECK(first.reward_evals > 0);

    const FrameSegmentation second = segment_frame(frame, cfg, qt);
    CHECK(second.reward_evals == 0);
    CHECK(second.known_state_hits == second.approx.boundary.size());
    CHECK(first.mask == second.mask);
    CHECK(first.fire_granules == second.fire_granules);
}

TEST_CASE("sandwich invariant on random frames") {
    std::mt19937 rng(2025);
    PipelineConfig cfg;
    QTable qt;
    for (int trial = 0; trial < 25; ++trial) {
        const FrameBuffer f = testutil::random_palette_frame(rng, 16, 12, 5);
        const FrameSegmentation seg = segment_frame(f, cfg, qt);
        const PixelMask lower = mask_from_granules(seg.granulated, seg.approx.lower);
        const PixelMask upper = mask_from_granules(seg.granulated, seg.approx.upper);
        for (std::size_t i = 0; i < seg.mask.size(); ++i) {
            if (lower.test(i)) CHECK(seg.mask.test(i));
            if (seg.mask.test(i)) CHECK(upper.test(i));
        }
    }
}

TEST_CASE("refine output is idempotent under the trained table") {
    const FrameBuffer frame = composite_frame();
    PipelineConfig cfg;
    QTable qt;
    const FrameSegmentation seg = segment_frame(frame, cfg, qt);

    RoughApproximation again;
    again.lower = seg.fire_granules;
    again.upper = seg.approx.upper;
    std::set_difference(again.upper.begin(), again.upper.end(), again.lower.begin(),
                        again.lower.end(), std::back_inserter(again.boundary));

    const RefineResult r = refine(seg.granulated, again, cfg.agent, qt);
    CHECK(r.fire == seg.fire_granules);
    CHECK(r.reward_evals == 0);
}

TEST_CASE("q-table grows monotonically and q values respect the depth bound") {
    std::mt19937 rng(909);
    PipelineConfig cfg;
    QTable qt;
    std::size_t prev_size = 0;
    std::map<StateKey, std::uint64_t> prev_visits;
    for (int t = 0; t < 15; ++t) {
        const FrameBuffer f = testutil::random_palette_frame(rng, 14, 10, 4);
        segment_frame(f, cfg, qt);
        CHECK(qt.size() >= prev_size);
        prev_size = qt.size();
        for (const auto& [key, e] : qt.entries()) {
            const auto it = prev_visits.find(key);
            if (it != prev_visits.end()) CHECK(e.visits >= it->second);
            prev_visits[key] = e.visits;
        }
    }
    const double bound = 1.0 + cfg.agent.gamma + 1e-12; // rewards in [-1,1], depth 1
    for (const auto& [key, e] : qt.entries()) {
        CHECK(std::abs(e.q_include) <= bound);
        CHECK(std::abs(e.q_exclude) <= bound);
    }
}

TEST_CASE("frame without any rule hit segments to an empty mask") {
    const FrameBuffer f(12, 8, {0, 60, 200});
    PipelineConfig cfg;
    QTable qt;
    const FrameSegmentation seg = segment_frame(f, cfg, qt);
    CHECK(seg.mask.count() == 0);
    CHECK(seg.no_fire_model);
}

TEST_CASE("rule-aligned rectangle is segmented exactly") {
    const SynthScenario scenario;
    const SynthFrame sf = synth_frame(scenario, 0);
    PipelineConfig cfg;
    QTable qt;
    const FrameSegmentation seg = segment_frame(sf.frame, cfg, qt);
    CHECK(seg.mask == sf.gt);
}

TEST_CASE("q-table round-trips through its JSON file") {
    testutil::TempDir tmp("qtable");
    const auto path = tmp.path() / "agent.json";

    const FrameBuffer frame = composite_frame();
    AgentConfig cfg;
    QTable qt;
    PipelineConfig pcfg;
    pcfg.agent = cfg;
    segment_frame(frame, pcfg, qt);
    REQUIRE(qt.size() > 0);

    qt.save(path, cfg);
    const QTable loaded = QTable::load(path, cfg);
    CHECK(loaded == qt);
}

TEST_CASE("q-table load rejects foreign and mismatched files") {
    testutil::TempDir tmp("qtable_bad");
    const AgentConfig cfg;

    SUBCASE("missing file") {
        CHECK_THROWS_AS(QTable::load(tmp.path() / "absent.json", cfg), std::runtime_error);
    }
    SUBCASE("not a q-table") {
        const auto path = tmp.path() / "other.json";
        std::ofstream(path) << "{\"format\":\"something-else\"}";
        CHECK_THROWS_AS(QTable::load(path, cfg), std::runtime_error);
    }
    SUBCASE("malformed json") {
        const auto path = tmp.path() / "broken.json";
        std::ofstream(path) << "{nope";
        CHECK_THROWS_AS(QTable::load(path, cfg), std::runtime_error);
    }
    SUBCASE("different configuration") {
        const auto path = tmp.path() / "trained.json";
        QTable qt;
        qt.record(quantize_state(constant_feature(0.5), cfg.quant_levels),
                  {0.5, 0.25, Action::include, 3});
        qt.save(path, cfg);

        AgentConfig other = cfg;
        other.quant_levels = 32;
        CHECK_THROWS_AS(QTable::load(path, other), std::runtime_error);
        other = cfg;
        other.gamma = 0.5;
        CHECK_THROWS_AS(QTable::load(path, other), std::runtime_error);
        CHECK_NOTHROW(QTable::load(path, cfg));
    }
}

TEST_CASE("agent config validation") {
    AgentConfig cfg;
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.quant_levels = 1;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.lookahead_depth = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(AgentConfig{}));
}

TEST_SUITE_END();
