#include "replab/specgraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "replab/errors.hpp"

namespace replab {

const char* to_string(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::loop: return "loop";
    case ComponentKind::string: return "string";
    case ComponentKind::other: return "other";
    }
    return "other";
}

Digraph digraph_of(const CMatrix& W, double threshold) {
    if (W.rows() != W.cols())
        throw ShapeError("digraph_of: matrix must be square");
    Digraph g;
    g.vertex_count = static_cast<std::size_t>(W.rows());
    for (Eigen::Index i = 0; i < W.rows(); ++i)
        for (Eigen::Index j = 0; j < W.cols(); ++j)
            if (std::abs(W(i, j)) > threshold)
                g.edges.emplace(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return g;
}

Digraph digraph_of(const CMatrix& W) { return digraph_of(W, 1e-8 * W.norm()); }

TransmittersReceivers transmitters_receivers(const Digraph& g) {
    std::vector<bool> has_in(g.vertex_count, false);
    std::vector<bool> has_out(g.vertex_count, false);
    for (const auto& [i, j] : g.edges) {
        has_out[i] = true;
        has_in[j] = true;
    }
    TransmittersReceivers tr;
    for (std::size_t v = 0; v < g.vertex_count; ++v) {
        if (!has_in[v])
            tr.transmitters.push_back(v);
        if (!has_out[v])
            tr.receivers.push_back(v);
    }
    return tr;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const Digraph& g) {
    const std::size_t n = g.vertex_count;
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [i, j] : g.edges)
        adj[i].push_back(j);

    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;

    // Iterative Tarjan; frames hold (vertex, next adjacency position).
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < adj[v].size()) {
                const std::size_t w = adj[v][pos++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
        }
    }
    return components;
}

bool strongly_connected(const Digraph& g) {
    if (g.vertex_count == 0)
        return false;
    return strongly_connected_components(g).size() == 1;
}

std::vector<Component> classify(const Digraph& g) {
    const std::size_t n = g.vertex_count;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [i, j] : g.edges)
        parent[find(i)] = find(j);

    std::map<std::size_t, Component> by_root;
    for (std::size_t v = 0; v < n; ++v)
        by_root[find(v)].vertices.push_back(v);

    std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
    std::map<std::size_t, std::size_t> edge_count;
    for (const auto& [i, j] : g.edges) {
        ++outdeg[i];
        ++indeg[j];
        ++edge_count[find(i)];
    }

    std::vector<Component> out;
    for (auto& [root, comp] : by_root) {
        const std::size_t v = comp.vertices.size();
        const std::size_t e = edge_count[root];
        const bool simple = std::all_of(comp.vertices.begin(), comp.vertices.end(),
                                        [&](std::size_t x) { return indeg[x] <= 1 && outdeg[x] <= 1; });
        if (simple && e == v)
            comp.kind = ComponentKind::loop;
        else if (simple && e + 1 == v)
            comp.kind = ComponentKind::string;
        else
            comp.kind = ComponentKind::other;
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end(),
              [](const Component& a, const Component& b) { return a.vertices.front() < b.vertices.front(); });
    return out;
}

namespace {

double offdiag_norm(const CMatrix& m) {
    return (m - CMatrix(m.diagonal().asDiagonal())).norm();
}

// Columns of V diagonalize D within each eigenspace of D, refined by Dt.
CMatrix refine_eigenspaces(const CMatrix& D, const CMatrix& Dt, double tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(D);
    const CMatrix V = es.eigenvectors();
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::Index n = D.rows();
    CMatrix out(n, n);
    Eigen::Index start = 0;
    const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && ev(end) - ev(end - 1) <= tol * scale)
            ++end;
        const CMatrix block = V.middleCols(start, end - start);
        const CMatrix projected = block.adjoint() * Dt * block;
        Eigen::SelfAdjointEigenSolver<CMatrix> inner(projected);
        out.middleCols(start, end - start) = block * inner.eigenvectors();
        start = end;
    }
    return out;
}

// Nearest unitary (polar factor).
CMatrix nearest_unitary(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

bool lex_less(const PlanePoint& a, const PlanePoint& b) {
    return a.d < b.d || (a.d == b.d && a.dt < b.dt);
}

struct Cluster {
    PlanePoint point;
    std::vector<Eigen::Index> indices;  // eigenbasis positions
};

struct ChainBlock {
    RepKind kind;
    double phase = 0.0;
    std::vector<PlanePoint> points;
    std::vector<CMatrix> basis;  // one column vector per vertex, in eigenbasis coordinates
};

CMatrix canonical_matrix(const ChainBlock& b) {
    const auto n = static_cast<Eigen::Index>(b.points.size());
    CMatrix W = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k)
        W(k, k + 1) = std::sqrt(std::max(0.0, b.points[static_cast<std::size_t>(k)].d));
    if (b.kind == RepKind::loop)
        W(n - 1, 0) = std::polar(std::sqrt(std::max(0.0, b.points.back().d)), b.phase);
    return W;
}

} // namespace

JointDiagonalization simultaneous_diagonalize(const CMatrix& W, double tol) {
    if (W.rows() != W.cols())
        throw ShapeError("simultaneous_diagonalize: matrix must be square");
    const CMatrix D = W * W.adjoint();
    const CMatrix Dt = W.adjoint() * W;
    const double wn = W.norm();
    const double scale = (1.0 + wn * wn) * (1.0 + wn * wn);
    const double comm = (D * Dt - Dt * D).norm();
    if (!(comm < tol * scale))
        throw NotARepresentationError("W W^dagger and W^dagger W do not commute (||[D, Dt]||_F = " +
                                      std::to_string(comm) + ")");

    // Fixed-seed generic combination separates joint eigenspaces with probability one.
    std::mt19937_64 rng(0x5d1a6);
    const double t = 1.0 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(D + t * Dt);
    CMatrix V = es.eigenvectors();

    const double check = 1e-10 * (1.0 + wn * wn);
    if (offdiag_norm(V.adjoint() * D * V) > check || offdiag_norm(V.adjoint() * Dt * V) > check)
        V = refine_eigenspaces(D, Dt, 1e-10);

    JointDiagonalization jd;
    jd.U = V.adjoint();
    jd.d = (V.adjoint() * D * V).diagonal().real();
    jd.dt = (V.adjoint() * Dt * V).diagonal().real();
    return jd;
}

DecompositionReport decompose(const Representation& rep, const AlgebraParams& p, double tol) {
    const CMatrix& W = rep.W;
    if (W.rows() != W.cols())
        throw ShapeError("decompose: matrix must be square");
    const Eigen::Index n = W.rows();
    const double wn = W.norm();

    const RelationResidual res = relation_residual(p, W);
    if (res.max() > tol * residual_scale(W))
        throw NotARepresentationError("input violates the defining relations (residual " +
                                      std::to_string(res.max()) + ")");

    const JointDiagonalization jd = simultaneous_diagonalize(W, tol);
    const CMatrix Wp = jd.U * W * jd.U.adjoint();

    // Group joint eigenvalue pairs into spectrum points.
    std::vector<PlanePoint> raw;
    for (Eigen::Index i = 0; i < n; ++i)
        raw.push_back({jd.d(i), jd.dt(i)});
    const double spec_tol = spectral_tolerance(raw);
    std::vector<Cluster> clusters;
    for (Eigen::Index i = 0; i < n; ++i) {
        const PlanePoint& x = raw[static_cast<std::size_t>(i)];
        auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
            return std::max(std::abs(c.point.d - x.d), std::abs(c.point.dt - x.dt)) <= spec_tol;
        });
        if (it == clusters.end())
            clusters.push_back({x, {i}});
        else
            it->indices.push_back(i);
    }
    for (auto& c : clusters) {
        PlanePoint mean{0.0, 0.0};
        for (auto i : c.indices) {
            mean.d += jd.d(i);
            mean.dt += jd.dt(i);
        }
        const double m = static_cast<double>(c.indices.size());
        c.point = {mean.d / m, mean.dt / m};
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return lex_less(a.point, b.point); });

    {
        std::vector<PlanePoint> pts;
        for (const auto& c : clusters)
            pts.push_back(c.point);
        if (!locally_injective(pts, p))
            throw UnsupportedRepresentationError(
                "representation is not locally injective; the structure theorem does not apply");
    }

    auto block_of = [&](std::size_t a, std::size_t b) {
        const auto& ia = clusters[a].indices;
        const auto& ib = clusters[b].indices;
        CMatrix B(static_cast<Eigen::Index>(ia.size()), static_cast<Eigen::Index>(ib.size()));
        for (std::size_t r = 0; r < ia.size(); ++r)
            for (std::size_t c = 0; c < ib.size(); ++c)
                B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Wp(ia[r], ib[c]);
        return B;
    };

    // Cluster-level digraph: a nonzero block a -> b forces point(b) = s(point(a)).
    const std::size_t nc = clusters.size();
    const double edge_threshold = 1e-8 * wn;
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> next(nc, none), prev(nc, none);
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = 0; b < nc; ++b) {
            if (block_of(a, b).norm() <= edge_threshold)
                continue;
            if (next[a] != none || prev[b] != none)
                throw DecompositionFailedError("spectrum points have more than one successor or predecessor");
            next[a] = b;
            prev[b] = a;
        }
    }

    std::vector<ChainBlock> blocks;
    std::vector<bool> visited(nc, false);

    auto walk = [&](std::size_t start, bool cyclic) {
        std::vector<std::size_t> chain{start};
        visited[start] = true;
        for (std::size_t c = next[start]; c != none && c != start; c = next[c]) {
            chain.push_back(c);
            visited[c] = true;
        }
        const std::size_t m = clusters[start].indices.size();
        for (auto c : chain)
            if (clusters[c].indices.size() != m)
                throw DecompositionFailedError("multiplicities differ along a chain of spectrum points");

        // Transport an orthonormal frame along the chain so every block becomes sqrt(d) I.
        const auto msz = static_cast<Eigen::Index>(m);
        std::vector<CMatrix> frames{CMatrix::Identity(msz, msz)};
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            const double d = clusters[chain[k]].point.d;
            if (!(d > 0.0))
                throw DecompositionFailedError("interior spectrum point with d = 0");
            const CMatrix B = block_of(chain[k], chain[k + 1]);
            frames.push_back(nearest_unitary(B.adjoint() * frames.back() / std::sqrt(d)));
        }

        std::vector<double> phases(m, 0.0);
        if (cyclic) {
            const double d = clusters[chain.back()].point.d;
            const CMatrix B = block_of(chain.back(), chain.front());
            const CMatrix holonomy = nearest_unitary(frames.back().adjoint() * B * frames.front() / std::sqrt(d));
            // Normal matrix: its complex Schur form is diagonal with a unitary Schur basis.
            Eigen::ComplexSchur<CMatrix> schur(holonomy);
            const CMatrix Q = schur.matrixU();
            for (auto& f : frames)
                f = f * Q;
            for (std::size_t j = 0; j < m; ++j)
                phases[j] = canonical_phase(std::arg(schur.matrixT()(static_cast<Eigen::Index>(j),
                                                                     static_cast<Eigen::Index>(j))));
        }

        for (std::size_t j = 0; j < m; ++j) {
            ChainBlock cb;
            cb.kind = cyclic ? RepKind::loop : RepKind::string;
            cb.phase = phases[j];
            for (std::size_t k = 0; k < chain.size(); ++k) {
                const auto& cl = clusters[chain[k]];
                cb.points.push_back(cl.point);
                CMatrix v = CMatrix::Zero(n, 1);
                for (std::size_t r = 0; r < m; ++r)
                    v(cl.indices[r], 0) = frames[k](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
                cb.basis.push_back(std::move(v));
            }
            if (!cyclic) {
                cb.points.front().dt = 0.0;
                cb.points.back().d = 0.0;
            }
            blocks.push_back(std::move(cb));
        }
    };

    for (std::size_t c = 0; c < nc; ++c)
        if (prev[c] == none && !visited[c])
            walk(c, false);
    // Remaining clusters lie on cycles; clusters are sorted, so each cycle starts at its
    // lexicographically smallest point.
    for (std::size_t c = 0; c < nc; ++c)
        if (!visited[c])
            walk(c, true);

    std::stable_sort(blocks.begin(), blocks.end(), [](const ChainBlock& a, const ChainBlock& b) {
        if (a.points.size() != b.points.size())
            return a.points.size() < b.points.size();
        const auto ma = *std::min_element(a.points.begin(), a.points.end(), lex_less);
        const auto mb = *std::min_element(b.points.begin(), b.points.end(), lex_less);
        if (lex_less(ma, mb) || lex_less(mb, ma))
            return lex_less(ma, mb);
        return a.phase < b.phase;
    });

    // Assemble T = Q^dagger U, where the columns of Q are the transported basis vectors.
    CMatrix Q(n, n);
    CMatrix canonical = CMatrix::Zero(n, n);
    Eigen::MatrixXi pattern = Eigen::MatrixXi::Zero(n, n);
    DecompositionReport report;
    Eigen::Index col = 0;
    for (const auto& b : blocks) {
        const auto dim = static_cast<Eigen::Index>(b.points.size());
        for (Eigen::Index k = 0; k < dim; ++k)
            Q.col(col + k) = b.basis[static_cast<std::size_t>(k)];
        const CMatrix Wb = canonical_matrix(b);
        canonical.block(col, col, dim, dim) = Wb;
        for (Eigen::Index k = 0; k + 1 < dim; ++k)
            pattern(col + k, col + k + 1) = 1;
        if (b.kind == RepKind::loop)
            pattern(col + dim - 1, col) = 1;

        DecomposedBlock db;
        db.rep.W = Wb;
        db.rep.kind = b.kind;
        db.rep.phase = b.phase;
        if (b.kind == RepKind::loop)
            db.rep.source = PeriodicOrbit{b.points};
        else
            db.rep.source = NString{b.points};
        for (const auto& x : b.points)
            db.spectrum.push_back({x, 1});
        std::sort(db.spectrum.begin(), db.spectrum.end(),
                  [](const SpectrumPoint& u, const SpectrumPoint& v) { return lex_less(u.point, v.point); });
        db.residual = relation_residual(p, Wb);
        report.blocks.push_back(std::move(db));
        col += dim;
    }

    report.transform = Q.adjoint() * jd.U;
    const CMatrix M = report.transform * W * report.transform.adjoint();
    double leak2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (!pattern(i, j))
                leak2 += std::norm(M(i, j));
    report.offdiag_leakage = std::sqrt(leak2);
    report.reconstruction_error = (M - canonical).norm();
    if (report.offdiag_leakage > tol * (1.0 + wn))
        throw DecompositionFailedError("off-pattern leakage " + std::to_string(report.offdiag_leakage) +
                                       " exceeds tolerance");
    return report;
}

} // namespace replab
