#include "shdr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "shdr/error.hpp"
#include "shdr/union_find.hpp"

namespace shdr {

Eigen::VectorXd apply_normalized(const ConsensusGraph& g, const Eigen::VectorXd& inv_sqrt_degree,
                                 const Eigen::VectorXd& x) {
    const Eigen::VectorXd scaled = inv_sqrt_degree.cwiseProduct(x);
    return inv_sqrt_degree.cwiseProduct(g.multiply(scaled));
}

Eigen::MatrixXd normalized_adjacency(const ConsensusGraph& g) {
    const Eigen::VectorXd inv = g.degrees().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd a = g.is_dense() ? g.dense_weights() : Eigen::MatrixXd(g.sparse_weights());
    return inv.asDiagonal() * a * inv.asDiagonal();
}

std::vector<std::size_t> graph_components(const ConsensusGraph& g) {
    UnionFind uf(static_cast<std::size_t>(g.size()));
    g.for_each_edge([&](Eigen::Index i, Eigen::Index j, double) {
        uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    });
    return uf.component_sizes();
}

void fix_sign_and_norm(Eigen::Ref<Eigen::VectorXd> v) {
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

namespace {

// S restricted to the orthogonal complement of the columns of Q (orthonormal).
struct Deflated {
    const ConsensusGraph& g;
    const Eigen::VectorXd& inv_sqrt;
    const Eigen::MatrixXd& Q;

    Eigen::VectorXd project(Eigen::VectorXd x) const { return x - Q * (Q.transpose() * x); }
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        return project(apply_normalized(g, inv_sqrt, project(x)));
    }
};

// Orthogonalizes x against the first k columns of V and against Q (two passes).
void orthogonalize(Eigen::VectorXd& x, const Eigen::MatrixXd& V, Eigen::Index k, const Eigen::MatrixXd& Q) {
    for (int pass = 0; pass < 2; ++pass) {
        x -= Q * (Q.transpose() * x);
        if (k > 0) x -= V.leftCols(k) * (V.leftCols(k).transpose() * x);
    }
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, const Eigen::MatrixXd& V, Eigen::Index k,
                            const Eigen::MatrixXd& Q) {
    std::normal_distribution<double> normal;
    for (int attempt = 0; attempt < 16; ++attempt) {
        Eigen::VectorXd x(Q.rows());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
        orthogonalize(x, V, k, Q);
        const double nrm = x.norm();
        if (nrm > 1e-8) return x / nrm;
    }
    throw Error(ErrorCode::ConvergenceFailure, "could not extend Krylov basis");
}

std::string format_sizes(const std::vector<std::size_t>& sizes) {
    std::ostringstream os;
    os << sizes.size() << " components, sizes [";
    const std::size_t shown = std::min<std::size_t>(sizes.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) os << (i ? ", " : "") << sizes[i];
    if (shown < sizes.size()) os << ", ...";
    os << ']';
    return os.str();
}

void finish(SpectralResult& out, const ConsensusGraph& g, const Eigen::VectorXd& inv_sqrt, int n_modes,
            double tol) {
    const Eigen::Index n = g.size();
    out.vectors.resize(n, out.sym_vectors.cols());
    out.residuals.resize(out.sym_vectors.cols());
    for (Eigen::Index c = 0; c < out.sym_vectors.cols(); ++c) {
        auto u = out.sym_vectors.col(c);
        fix_sign_and_norm(u);
        const Eigen::VectorXd su = apply_normalized(g, inv_sqrt, u);
        out.eigenvalues(c) = u.dot(su);
        out.residuals(c) = (su - out.eigenvalues(c) * u).norm();
        Eigen::VectorXd v = inv_sqrt.cwiseProduct(u);
        fix_sign_and_norm(v);
        out.vectors.col(c) = v;
    }
    out.degenerate = false;
    for (int c = 1; c < n_modes; ++c)
        if (out.eigenvalues(c) - out.eigenvalues(c + 1) < tol) out.degenerate = true;
    if (std::isfinite(out.next_eigenvalue) && out.eigenvalues(n_modes) - out.next_eigenvalue < tol)
        out.degenerate = true;
}

struct LanczosPairs {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors;
};

// Thick-restart Lanczos for the nev largest eigenpairs of S on the complement of Q.
LanczosPairs lanczos(const ConsensusGraph& g, const Eigen::VectorXd& inv_sqrt, const Eigen::MatrixXd& Q, int nev,
                     Eigen::Index ncv, const SpectralOptions& options, std::mt19937_64& rng, int& restarts) {
    const Eigen::Index n = g.size();
    const Deflated op{g, inv_sqrt, Q};
    Eigen::MatrixXd V(n, ncv);
    Eigen::MatrixXd W(n, ncv);
    V.col(0) = random_unit(rng, V, 0, Q);
    Eigen::Index filled = 0;  // columns of V with W = op(V) computed
    Eigen::Index basis = 1;   // columns of V that are valid
    bool refreshed = false;

    for (int restart = 0; restart < options.max_iter; ++restart) {
        ++restarts;
        Eigen::VectorXd next;
        while (filled < ncv) {
            W.col(filled) = op(V.col(filled));
            ++filled;
            Eigen::VectorXd f = W.col(filled - 1);
            orthogonalize(f, V, basis, Q);
            const double beta = f.norm();
            next = beta > 1e-10 ? Eigen::VectorXd(f / beta) : random_unit(rng, V, basis, Q);
            if (basis < ncv) V.col(basis++) = next;
        }

        Eigen::MatrixXd H = V.transpose() * W;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const Eigen::VectorXd theta = es.eigenvalues().reverse();
        const Eigen::MatrixXd ritz = es.eigenvectors().rowwise().reverse();

        double worst = 0.0;
        for (int c = 0; c < nev; ++c) {
            const Eigen::VectorXd y = ritz.col(c);
            worst = std::max(worst, (W * y - theta(c) * (V * y)).norm());
        }

        if (worst <= options.tol) {
            Eigen::MatrixXd U = V * ritz.leftCols(nev);
            // Confirm against a fresh product; accumulated rotation error can hide residual.
            double true_worst = 0.0;
            for (int c = 0; c < nev; ++c) {
                Eigen::VectorXd u = U.col(c);
                true_worst = std::max(true_worst, (op(u) - theta(c) * u).norm());
            }
            if (true_worst <= options.tol || refreshed) return {theta.head(nev), std::move(U)};
            refreshed = true;
        }

        // Thick restart: keep the leading Ritz vectors, then continue from the residual direction.
        const Eigen::Index keep = std::min<Eigen::Index>(nev + (ncv - nev) / 2, ncv - 1);
        Eigen::MatrixXd Vk = V * ritz.leftCols(keep);
        V.leftCols(keep) = Vk;
        if (refreshed) {
            for (Eigen::Index c = 0; c < keep; ++c) W.col(c) = op(V.col(c));
        } else {
            Eigen::MatrixXd Wk = W * ritz.leftCols(keep);
            W.leftCols(keep) = Wk;
        }
        Eigen::VectorXd f = next;
        orthogonalize(f, V, keep, Q);
        const double nrm = f.norm();
        V.col(keep) = nrm > 1e-8 ? Eigen::VectorXd(f / nrm) : random_unit(rng, V, keep, Q);
        filled = keep;
        basis = keep + 1;
    }

    std::ostringstream os;
    os << "no convergence after " << options.max_iter << " restarts";
    throw Error(ErrorCode::ConvergenceFailure, os.str());
}

}  // namespace

SpectralResult diffusion_modes(const ConsensusGraph& g, const SpectralOptions& options) {
    const Eigen::Index n = g.size();
    const int m = options.n_modes;
    if (m < 1) throw Error(ErrorCode::ArgumentRange, "n_modes must be >= 1");
    if (m > n - 1)
        throw Error(ErrorCode::ArgumentRange,
                    "n_modes = " + std::to_string(m) + " exceeds graph size - 1 = " + std::to_string(n - 1));
    if (!(options.tol > 0.0)) throw Error(ErrorCode::ArgumentRange, "tol must be > 0");

    const auto sizes = graph_components(g);
    if (sizes.size() > 1) throw Error(ErrorCode::DisconnectedGraph, format_sizes(sizes));

    const Eigen::VectorXd degree = g.degrees();
    if ((degree.array() <= 0.0).any()) throw Error(ErrorCode::DisconnectedGraph, "node with zero degree");
    const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd u0 = degree.cwiseSqrt().normalized();

    // One extra pair beyond those requested to detect a degenerate gap.
    const int nev = static_cast<int>(std::min<Eigen::Index>(m + 1, n - 1));
    int ncv = options.krylov_dim > 0 ? options.krylov_dim : std::max(2 * (nev + 1) + 16, 24);
    ncv = std::max(ncv, nev + 2);

    SpectralResult out;
    out.eigenvalues.resize(m + 1);
    out.sym_vectors.resize(n, m + 1);
    out.next_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    out.eigenvalues(0) = 1.0;
    out.sym_vectors.col(0) = u0;

    if (ncv >= n - 1) {
        // Small graph: the Krylov space would be the whole space anyway.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normalized_adjacency(g));
        for (int c = 1; c <= m; ++c) out.sym_vectors.col(c) = es.eigenvectors().col(n - 1 - c);
        if (nev > m) out.next_eigenvalue = es.eigenvalues()(n - 2 - m);
        finish(out, g, inv_sqrt, m, options.tol);
        return out;
    }

    // A single Krylov sequence sees one direction per eigenspace, so repeated
    // eigenvalues are missed. Rerun deflated against everything found until
    // the new leading value falls clearly below the current nev-th.
    std::mt19937_64 rng(options.seed);
    Eigen::MatrixXd Q = u0;
    std::vector<std::pair<double, Eigen::VectorXd>> pool;
    for (int pass = 0; pass <= nev + 1 && Q.cols() + ncv < n; ++pass) {
        const auto found = lanczos(g, inv_sqrt, Q, nev, ncv, options, rng, out.restarts);
        if (!pool.empty() && found.values(0) < pool[static_cast<std::size_t>(nev) - 1].first - options.tol) break;
        Q.conservativeResize(Eigen::NoChange, Q.cols() + nev);
        for (int c = 0; c < nev; ++c) {
            pool.emplace_back(found.values(c), found.vectors.col(c));
            Q.col(Q.cols() - nev + c) = found.vectors.col(c);
        }
        std::stable_sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    }

    for (int c = 1; c <= m; ++c) out.sym_vectors.col(c) = pool[static_cast<std::size_t>(c) - 1].second;
    if (nev > m) out.next_eigenvalue = pool[static_cast<std::size_t>(m)].first;
    finish(out, g, inv_sqrt, m, options.tol);
    if ((out.residuals.array() > options.tol).any()) {
        std::ostringstream os;
        os << "residual " << out.residuals.maxCoeff() << " above tol " << options.tol;
        throw Error(ErrorCode::ConvergenceFailure, os.str());
    }
    return out;
}

}  // namespace shdr
