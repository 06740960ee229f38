#include <geocover/halfspace/envelope.hpp>
#include <geocover/halfspace/hull3d.hpp>
#include <geocover/halfspace/r_division.hpp>
#include <geocover/oracle/generators.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <set>

using namespace geocover;
using halfspace::ConvexHull3;
using halfspace::EnvelopeConfig;
using halfspace::EnvelopeDecomposition;

namespace {

void check_hull(const std::vector<Point3>& pts, std::uint64_t seed) {
    ConvexHull3 H(pts, seed);
    const auto& F = H.faces();
    std::size_t live = 0;
    for (std::uint32_t f = 0; f < F.size(); ++f) {
        if (!F[f].alive) continue;
        ++live;
        for (const auto& p : pts) ASSERT_LE(H.side(f, p), 0) << "face " << f;
        for (std::uint32_t k = 0; k < 3; ++k) {
            const auto g = F[f].nb[k];
            ASSERT_LT(g, F.size());
            ASSERT_TRUE(F[g].alive);
            const auto a = F[f].v[k], b = F[f].v[(k + 1) % 3];
            bool found = false;
            for (std::uint32_t j = 0; j < 3; ++j)
                if (F[g].v[j] == b && F[g].v[(j + 1) % 3] == a && F[g].nb[j] == f) found = true;
            ASSERT_TRUE(found);
        }
    }
    std::size_t verts = 0;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        if (!H.on_hull(i)) continue;
        ++verts;
        const auto around = H.faces_around(i);
        ASSERT_GE(around.size(), 3u);
        std::set<std::uint32_t> uniq(around.begin(), around.end());
        ASSERT_EQ(uniq.size(), around.size());
    }
    EXPECT_EQ(live, H.live_faces());
    EXPECT_EQ(2 * verts, live + 4);  // closed triangulated sphere
}

// plane value of h at integer (x, y)
Wide at(const Halfspace3& h, Coord x, Coord y) { return Wide(h.a) * x + Wide(h.b) * y + h.c; }

}  // namespace

TEST(Hull3, RandomPoints) {
    Rng rng(1);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Point3> pts;
        for (int i = 0; i < 300; ++i) pts.push_back({oracle::gen_detail::uniform_in(rng, -1000, 1000), oracle::gen_detail::uniform_in(rng, -1000, 1000),
                                                     oracle::gen_detail::uniform_in(rng, -1000000, 1000000)});
        check_hull(pts, rep);
    }
}

TEST(Hull3, DegenerateInputs) {
    std::vector<Point3> grid;
    for (Coord x = 0; x < 5; ++x)
        for (Coord y = 0; y < 5; ++y)
            for (Coord z = 0; z < 5; ++z) grid.push_back({x, y, z});
    grid.push_back({2, 2, 2});
    grid.push_back({0, 0, 0});
    check_hull(grid, 3);

    std::vector<Point3> para;
    for (Coord x = -6; x <= 6; ++x)
        for (Coord y = -6; y <= 6; ++y) para.push_back({x, y, -(x * x + y * y)});
    check_hull(para, 4);

    // lifted sample with the far bounding planes used by the envelope
    std::vector<Point3> dual{{3, 4, 10}, {3, 4, 10}, {3, 4, -20}};
    const Coord S = Coord{1} << 30, K = Coord{1} << 60;
    for (auto p : {Point3{-S, 0, K}, Point3{S, 0, K}, Point3{0, -S, K}, Point3{0, S, K}}) dual.push_back(p);
    check_hull(dual, 5);
}

TEST(Envelope, SinglePlane) {
    std::vector<Point3> X;
    Rng rng(2);
    for (int i = 0; i < 100; ++i) X.push_back({oracle::gen_detail::uniform_in(rng, -500, 500), oracle::gen_detail::uniform_in(rng, -500, 500), -100000});
    std::vector<Halfspace3> S{{2, -3, 7}};
    EnvelopeDecomposition E(X, S, {0}, EnvelopeConfig{8});
    EXPECT_EQ(E.face_count(), 1u);
    for (const auto& c : E.cells()) {
        EXPECT_EQ(c.owner, 0u);
        EXPECT_TRUE(c.conflicts.empty());
        EXPECT_LE(c.points.size(), 8u);
    }
}

TEST(Envelope, DominatedParallelPlane) {
    std::vector<Point3> X;
    Rng rng(3);
    for (int i = 0; i < 200; ++i) X.push_back({oracle::gen_detail::uniform_in(rng, -500, 500), oracle::gen_detail::uniform_in(rng, -500, 500), 0});
    std::vector<Halfspace3> S{{1, 2, 0}, {1, 2, -50}};
    EnvelopeDecomposition E(X, S, {0, 1}, EnvelopeConfig{8});
    EXPECT_EQ(E.face_count(), 1u);
    for (const auto& c : E.cells()) {
        EXPECT_EQ(c.owner, 1u);
        EXPECT_TRUE(c.conflicts.empty());
    }
}

TEST(Envelope, ConflictsMatchCornerTest) {
    for (auto dist : {oracle::Distribution::uniform, oracle::Distribution::planted, oracle::Distribution::clustered,
                      oracle::Distribution::nested}) {
        oracle::GeneratorSpec g;
        g.kind = Kind::halfspaces3d;
        g.dist = dist;
        g.n_points = 1024;
        g.n_objects = 400;
        g.planted_k = 6;
        g.seed = 17;
        const auto inst = std::get<HalfspacesInstance>(oracle::generate(g).instance);
        Rng rng(4);
        auto R = sample_without_replacement(rng, inst.objects.size(), 64);
        std::vector<std::uint32_t> Rv(R.begin(), R.end());
        const std::uint32_t b = 6;
        EnvelopeDecomposition E(inst.points, inst.objects, Rv, EnvelopeConfig{b});
        const auto& cells = E.cells();
        std::vector<int> seen(inst.points.size(), 0);
        for (std::uint32_t c = 0; c < cells.size(); ++c) {
            const auto& C = cells[c];
            EXPECT_LE(C.points.size(), b);
            std::vector<std::uint32_t> brute;
            for (std::uint32_t s = 0; s < inst.objects.size(); ++s)
                if (E.crosses(c, inst.objects[s])) brute.push_back(s);
            ASSERT_EQ(C.conflicts, brute) << "cell " << c;
            for (auto p : C.points) {
                ++seen[p];
                ASSERT_EQ(E.cell_of(p), c);
                // envelope over the cell is the owner's plane
                const auto& q = inst.points[p];
                Wide env = at(inst.objects[Rv[0]], q.x, q.y);
                for (auto r : Rv) env = std::min(env, at(inst.objects[r], q.x, q.y));
                ASSERT_EQ(at(inst.objects[C.owner], q.x, q.y), env);
                ASSERT_EQ(E.covered_by_sample(p), Wide(q.z) >= env);
                if (Wide(q.z) >= env) continue;
                for (std::uint32_t s = 0; s < inst.objects.size(); ++s) {
                    if (contains(inst.objects[s], q)) {
                        ASSERT_TRUE(std::binary_search(C.conflicts.begin(), C.conflicts.end(), s));
                    }
                }
            }
        }
        for (auto s : seen) ASSERT_EQ(s, 1);
        for (std::uint32_t c = 0; c < cells.size(); ++c)
            for (auto d : E.adjacency()[c]) {
                const auto& A = E.adjacency()[d];
                ASSERT_TRUE(std::find(A.begin(), A.end(), c) != A.end());
            }
    }
}

namespace {

using Graph = std::vector<std::vector<std::uint32_t>>;

Graph path_graph(std::uint32_t m) {
    Graph G(m);
    for (std::uint32_t i = 0; i + 1 < m; ++i) {
        G[i].push_back(i + 1);
        G[i + 1].push_back(i);
    }
    return G;
}

Graph grid_graph(std::uint32_t w, std::uint32_t h) {
    Graph G(std::size_t(w) * h);
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x) {
            const auto v = y * w + x;
            if (x + 1 < w) {
                G[v].push_back(v + 1);
                G[v + 1].push_back(v);
            }
            if (y + 1 < h) {
                G[v].push_back(v + w);
                G[v + w].push_back(v);
            }
        }
    return G;
}

}  // namespace

TEST(RDivision, LargeGIsOneCluster) {
    const auto G = grid_graph(10, 10);
    const auto rd = halfspace::r_division(G, 100);
    EXPECT_EQ(rd.clusters.size(), 1u);
    EXPECT_TRUE(rd.boundary.empty());
    EXPECT_TRUE(halfspace::check_r_division(G, rd).ok(100, 100));
}

TEST(RDivision, PathGraph) {
    for (std::uint32_t m : {17u, 100u, 1000u}) {
        const auto G = path_graph(m);
        const auto rd = halfspace::r_division(G, 4);
        const auto ck = halfspace::check_r_division(G, rd);
        EXPECT_TRUE(ck.ok(m, 4));
        EXPECT_EQ(ck.cross_edges, 0u);
        EXPECT_LE(ck.boundary, m / 2);
        // no separator on a path can beat ceil(m / (g + 1)) - 1 cuts
        EXPECT_GE(ck.boundary, (m + 4) / 5 - 1);
    }
}

TEST(RDivision, GridAndDisconnected) {
    const auto G = grid_graph(60, 40);
    for (std::size_t g : {4, 16, 64, 256}) {
        const auto rd = halfspace::r_division(G, g);
        EXPECT_TRUE(halfspace::check_r_division(G, rd).ok(G.size(), g)) << g;
    }
    Graph two = path_graph(50);
    const auto grid = grid_graph(8, 8);
    for (const auto& row : grid) {
        two.emplace_back();
        for (auto w : row) two.back().push_back(w + 50);
    }
    const auto rd = halfspace::r_division(two, 9);
    EXPECT_TRUE(halfspace::check_r_division(two, rd).ok(two.size(), 9));
}

TEST(RDivision, EnvelopeDualGraphs) {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        oracle::GeneratorSpec gs;
        gs.kind = Kind::halfspaces3d;
        gs.dist = seed % 2 ? oracle::Distribution::clustered : oracle::Distribution::planted;
        gs.n_points = 3000;
        gs.n_objects = 600;
        gs.planted_k = 8;
        gs.seed = seed;
        const auto inst = std::get<HalfspacesInstance>(oracle::generate(gs).instance);
        Rng rng(seed);
        const auto R = sample_without_replacement(rng, inst.objects.size(), 120);
        EnvelopeDecomposition E(inst.points, inst.objects, std::vector<std::uint32_t>(R.begin(), R.end()),
                                EnvelopeConfig{4});
        const auto& G = E.adjacency();
        for (std::size_t g : {9, 36, 144}) {
            const auto rd = halfspace::r_division(G, g);
            const auto ck = halfspace::check_r_division(G, rd);
            EXPECT_TRUE(ck.ok(G.size(), g)) << "seed " << seed << " g " << g << " boundary " << ck.boundary;
            worst = std::max(worst, double(ck.boundary) * std::sqrt(double(g)) / double(G.size()));
        }
    }
    RecordProperty("c_sep", std::to_string(worst));
    std::printf("r-division boundary constant %.3f\n", worst);
}
