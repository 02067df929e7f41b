#include "rwre/harmonic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rwre {

namespace {

double max_abs(const std::vector<double>& v, const std::vector<std::int32_t>& at) {
    double m = 0;
    for (auto i : at) m = std::max(m, std::abs(v[i]));
    return m;
}

} // namespace

HarmonicField dirichlet_solve(const RootedEnvironment& env, const BallView& ball,
                              const std::vector<double>& g, double tol) {
    if (ball.boundary.empty())
        throw std::invalid_argument("dirichlet_solve: ball has no boundary");

    HarmonicField field;
    field.ball = ball;
    field.tol = tol;
    field.value.assign(env.num_vertices(), 0.0);
    std::vector<double>& h = field.value;
    for (auto b : ball.boundary) h[b] = g[b];

    const auto& interior = ball.inner;
    if (interior.empty()) {
        field.residual = 0;
        return field;
    }

    const double gmax = max_abs(h, ball.boundary);
    auto done = [&](double residual) {
        const double scale = std::max(max_abs(h, ball.members), 0.0);
        return residual <= tol * scale || (scale == 0 && residual == 0);
    };

    if (env.reversible()) {
        // CG on the interior block of the weighted Laplacian:
        //   nu(x) u(x) - sum_{y in interior} w(x,y) u(y) = sum_{y boundary} w(x,y) g(y)
        const std::size_t m = interior.size();
        std::vector<std::int32_t> local(env.num_vertices(), -1);
        for (std::size_t i = 0; i < m; ++i) local[interior[i]] = static_cast<std::int32_t>(i);

        std::vector<double> diag(m), b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::int32_t x = interior[i];
            double d = env.vertex_weight[x];
            for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k) {
                const std::int32_t y = env.col[k];
                if (y == x) d -= env.edge_weight[k];
                else if (local[y] < 0) b[i] += env.edge_weight[k] * h[y];
            }
            diag[i] = d;
        }
        auto matvec = [&](const std::vector<double>& u, std::vector<double>& out) {
            for (std::size_t i = 0; i < m; ++i) {
                const std::int32_t x = interior[i];
                double s = env.vertex_weight[x] * u[i];
                for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k) {
                    const std::int32_t y = env.col[k];
                    const std::int32_t j = local[y];
                    if (j >= 0) s -= env.edge_weight[k] * u[j];
                }
                out[i] = s;
            }
        };

        std::vector<double> u(m, 0.0), r(b), z(m), p(m), Ap(m);
        for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
        p = z;
        double rz = 0;
        for (std::size_t i = 0; i < m; ++i) rz += r[i] * z[i];

        const std::size_t cap = 40 * m + 1000;
        double res = std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < cap; ++it) {
            matvec(p, Ap);
            double pAp = 0;
            for (std::size_t i = 0; i < m; ++i) pAp += p[i] * Ap[i];
            if (pAp <= 0) break;
            const double alpha = rz / pAp;
            for (std::size_t i = 0; i < m; ++i) {
                u[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            // residual of the mean-value property at x is r_x / nu(x)
            res = 0;
            for (std::size_t i = 0; i < m; ++i)
                res = std::max(res, std::abs(r[i]) / env.vertex_weight[interior[i]]);
            for (std::size_t i = 0; i < m; ++i) h[interior[i]] = u[i];
            if (done(res)) break;
            double rz2 = 0;
            for (std::size_t i = 0; i < m; ++i) {
                z[i] = r[i] / diag[i];
                rz2 += r[i] * z[i];
            }
            const double beta = rz2 / rz;
            rz = rz2;
            for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
        }
        for (std::size_t i = 0; i < m; ++i) h[interior[i]] = u[i];
    } else {
        // Fixed-point sweeps h <- Ph on the interior.
        for (auto x : interior) h[x] = 0.0;
        std::vector<double> next(interior.size());
        const std::size_t cap = 1000000;
        for (std::size_t sweep = 0; sweep < cap; ++sweep) {
            double change = 0;
            for (std::size_t i = 0; i < interior.size(); ++i) {
                const std::int32_t x = interior[i];
                double ph = 0;
                for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k)
                    ph += env.prob[k] * h[env.col[k]];
                next[i] = ph;
                change = std::max(change, std::abs(ph - h[x]));
            }
            for (std::size_t i = 0; i < interior.size(); ++i) h[interior[i]] = next[i];
            if (sweep % 16 == 15 || change <= tol * std::max(gmax, 1e-300)) {
                double res = 0;
                for (auto x : interior) {
                    double ph = 0;
                    for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k)
                        ph += env.prob[k] * h[env.col[k]];
                    res = std::max(res, std::abs(h[x] - ph));
                }
                if (done(res)) break;
            }
        }
    }

    // Final certificate.
    double res = 0;
    for (auto x : interior) {
        double ph = 0;
        for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k)
            ph += env.prob[k] * h[env.col[k]];
        res = std::max(res, std::abs(h[x] - ph));
    }
    field.residual = res;
    const double scale = std::max(max_abs(h, ball.members), 0.0);
    if (!(res <= tol * std::max(scale, 1e-300) || (scale == 0 && res == 0)))
        throw SolverError("dirichlet_solve did not converge", res);
    return field;
}

ReversePoincareCheck check_reverse_poincare(const RootedEnvironment& env,
                                            const std::vector<double>& h, std::int32_t x,
                                            int n) {
    if (!env.reversible())
        throw std::invalid_argument("reverse Poincare requires edge weights");
    const BallView bn = ball(env, x, n);
    const BallView b2n = ball(env, x, 2 * n);

    double lhs = 0;
    for (auto v : bn.members)
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) {
            const std::int32_t u = env.col[k];
            if (u <= v || !bn.contains(u)) continue;
            const double dh = h[u] - h[v];
            lhs += dh * dh * env.edge_weight[k];
        }

    double rhs = 0;
    for (auto v : b2n.members) rhs += h[v] * h[v] * env.vertex_weight[v];
    rhs *= 4.0 / (static_cast<double>(n) * n);

    return {lhs, rhs, rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity()
                                                     : 0.0)};
}

namespace {

struct PencilWorkspace {
    const RootedEnvironment& env;
    std::vector<std::int32_t> members;    // B(2n), sorted
    std::vector<std::int32_t> local;      // env vertex -> local index or -1
    std::vector<char> in_small;           // local: member of B(n)
    std::vector<double> diag;             // Laplacian diagonal
    double nu_small = 0;                  // total nu over B(n)

    void apply_K(const std::vector<double>& f, std::vector<double>& out) const {
        for (std::size_t i = 0; i < members.size(); ++i) {
            const std::int32_t v = members[i];
            double s = 0;
            for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) {
                const std::int32_t j = local[env.col[k]];
                if (j < 0 || env.col[k] == v) continue;
                s += env.edge_weight[k] * (f[i] - f[j]);
            }
            out[i] = s;
        }
    }

    void apply_M(const std::vector<double>& f, std::vector<double>& out) const {
        double mean = 0;
        for (std::size_t i = 0; i < members.size(); ++i)
            if (in_small[i]) mean += env.vertex_weight[members[i]] * f[i];
        mean /= nu_small;
        for (std::size_t i = 0; i < members.size(); ++i)
            out[i] = in_small[i] ? env.vertex_weight[members[i]] * (f[i] - mean) : 0.0;
    }

    double quad(const std::vector<double>& f, const std::vector<double>& Tf) const {
        double s = 0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * Tf[i];
        return s;
    }

    // PCG for K u = b with b orthogonal to constants; the constant component
    // of the preconditioned residual is projected out each iteration.
    bool solve_K(const std::vector<double>& b, std::vector<double>& u) const {
        const std::size_t m = members.size();
        u.assign(m, 0.0);
        std::vector<double> r(b), z(m), p(m), Kp(m);
        double bnorm = 0;
        for (double v : b) bnorm = std::max(bnorm, std::abs(v));
        if (bnorm == 0) return true;
        auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
            double mean = 0;
            for (std::size_t i = 0; i < m; ++i) {
                zz[i] = rr[i] / diag[i];
                mean += zz[i];
            }
            mean /= m;
            for (std::size_t i = 0; i < m; ++i) zz[i] -= mean;
        };
        precond(r, z);
        p = z;
        double rz = quad(r, z);
        for (std::size_t it = 0; it < 20 * m + 500; ++it) {
            apply_K(p, Kp);
            const double pKp = quad(p, Kp);
            if (pKp <= 0) return false;
            const double alpha = rz / pKp;
            double rmax = 0;
            for (std::size_t i = 0; i < m; ++i) {
                u[i] += alpha * p[i];
                r[i] -= alpha * Kp[i];
                rmax = std::max(rmax, std::abs(r[i]));
            }
            if (rmax <= 1e-12 * bnorm) return true;
            precond(r, z);
            const double rz2 = quad(r, z);
            const double beta = rz2 / rz;
            rz = rz2;
            for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
        }
        return true;  // residual small enough for a power-iteration inner solve
    }
};

} // namespace

double poincare_constant(const RootedEnvironment& env, std::int32_t x, int n) {
    if (!env.reversible())
        throw std::invalid_argument("poincare_constant requires edge weights");
    const BallView b2n = ball(env, x, 2 * n);
    PencilWorkspace w{env, b2n.members, {}, {}, {}, 0};
    w.local.assign(env.num_vertices(), -1);
    const std::size_t m = w.members.size();
    for (std::size_t i = 0; i < m; ++i) w.local[w.members[i]] = static_cast<std::int32_t>(i);
    w.in_small.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (b2n.dist[i] <= n) {
            w.in_small[i] = 1;
            w.nu_small += env.vertex_weight[w.members[i]];
        }
    w.diag.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::int32_t v = w.members[i];
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k)
            if (w.local[env.col[k]] >= 0 && env.col[k] != v) w.diag[i] += env.edge_weight[k];
    }

    // Connectivity of the induced subgraph (unweighted BFS over induced edges).
    {
        std::vector<char> seen(m, 0);
        std::vector<std::size_t> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!queue.empty()) {
            const std::size_t i = queue.back();
            queue.pop_back();
            const std::int32_t v = w.members[i];
            for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) {
                const std::int32_t j = w.local[env.col[k]];
                if (j >= 0 && !seen[j] && env.col[k] != v) {
                    seen[j] = 1;
                    ++reached;
                    queue.push_back(static_cast<std::size_t>(j));
                }
            }
        }
        if (reached != m) return std::numeric_limits<double>::infinity();
        if (m < 2 || w.nu_small <= 0) return 0.0;
    }

    std::vector<double> f(m), Mf(m), Kf(m);
    for (std::size_t i = 0; i < m; ++i)
        f[i] = static_cast<double>((w.members[i] * 2654435761ULL >> 8) & 0xFFFF) / 65535.0 - 0.5;

    double lambda = 0;
    for (int it = 0; it < 300; ++it) {
        w.apply_M(f, Mf);
        w.apply_K(f, Kf);
        const double num = w.quad(f, Mf), den = w.quad(f, Kf);
        if (den <= 0) break;
        const double next = num / den;
        const bool settled = it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next);
        lambda = next;
        if (settled) break;
        std::vector<double> u;
        if (!w.solve_K(Mf, u)) break;
        double scale = 0;
        for (double v : u) scale = std::max(scale, std::abs(v));
        if (scale == 0) break;
        for (std::size_t i = 0; i < m; ++i) f[i] = u[i] / scale;
    }
    return lambda / (static_cast<double>(n) * n);
}

VolumeDoubling volume_doubling(const RootedEnvironment& env,
                               const std::vector<std::int32_t>& centers, int n) {
    VolumeDoubling out;
    for (auto c : centers) {
        const BallView bn = ball(env, c, n);
        const BallView b2n = ball(env, c, 2 * n);
        double vn = 0, v2n = 0;
        for (auto v : bn.members) vn += env.reversible() ? env.vertex_weight[v] : 1.0;
        for (auto v : b2n.members) v2n += env.reversible() ? env.vertex_weight[v] : 1.0;
        const double ratio = vn > 0 ? v2n / vn : 0.0;
        out.ratios.push_back(ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
}

BallCover proper_cover(const RootedEnvironment& env, std::int32_t center, int R, int r) {
    if (r > 2 * R && R > 0) r = 2 * R;  // larger radii add nothing
    BallCover cover;
    cover.center = center;
    cover.R = R;
    cover.r = r;
    const int s = r / 2;
    const BallView target = ball(env, center, R);

    // Greedy maximal family of disjoint s-balls: accept a candidate iff it is
    // at distance > 2s from every accepted center.
    std::vector<char> blocked(env.num_vertices(), 0);
    for (auto y : target.members) {
        if (blocked[y]) continue;
        cover.centers.push_back(y);
        for (auto v : ball(env, y, 2 * s).members) blocked[v] = 1;
    }

    // Exhaustive cover check with r-balls and exact overlap of the 2r-balls.
    std::vector<char> covered(env.num_vertices(), 0);
    std::vector<int> count(env.num_vertices(), 0);
    for (auto y : cover.centers) {
        for (auto v : ball(env, y, r).members) covered[v] = 1;
        for (auto v : ball(env, y, 2 * r).members) ++count[v];
    }
    cover.covers = true;
    for (auto v : target.members)
        if (!covered[v]) cover.covers = false;
    cover.overlap = *std::max_element(count.begin(), count.end());
    return cover;
}

ZeroMeanBasis zero_mean_subspace(const RootedEnvironment& env,
                                 const std::vector<std::vector<double>>& fields,
                                 const BallCover& cover) {
    const std::size_t d = fields.size(), M = cover.centers.size();
    Eigen::MatrixXd A(M, d);
    for (std::size_t i = 0; i < M; ++i) {
        const BallView b = ball(env, cover.centers[i], cover.r);
        double nu_total = 0;
        for (auto v : b.members) nu_total += env.reversible() ? env.vertex_weight[v] : 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0;
            for (auto v : b.members)
                s += (env.reversible() ? env.vertex_weight[v] : 1.0) * fields[j][v];
            A(i, j) = s / nu_total;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * std::max(smax, 1.0)) ++rank;

    ZeroMeanBasis out;
    for (std::size_t j = rank; j < d; ++j) {
        std::vector<double> c(d);
        for (std::size_t i = 0; i < d; ++i) c[i] = svd.matrixV()(i, j);
        std::vector<double> f(fields[0].size(), 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t v = 0; v < f.size(); ++v) f[v] += c[i] * fields[i][v];
        out.coeffs.push_back(std::move(c));
        out.fields.push_back(std::move(f));
    }
    return out;
}

LemmaBCheck check_lemma_b(const RootedEnvironment& env, const std::vector<double>& h,
                          double eps, int n) {
    const int r = std::max(1, static_cast<int>(eps * n));
    const BallCover cover = proper_cover(env, env.root, n, r);

    double c_p = 0;
    for (auto y : cover.centers) c_p = std::max(c_p, poincare_constant(env, y, r));

    const BallView bn = ball(env, env.root, n);
    const BallView b4n = ball(env, env.root, 4 * n);
    double lhs = 0, mass4 = 0;
    for (auto v : bn.members) lhs += h[v] * h[v] * env.vertex_weight[v];
    for (auto v : b4n.members) mass4 += h[v] * h[v] * env.vertex_weight[v];
    const double rhs = 4.0 * cover.overlap * c_p * eps * eps * mass4;
    return {lhs, rhs, rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity()
                                                     : 0.0),
            c_p, cover.overlap};
}

GramProbeReport gram_dimension_probe(const RootedEnvironment& env,
                                     const std::vector<std::vector<double>>& candidates,
                                     int n, double eps) {
    const std::size_t d = candidates.size();
    GramProbeReport rep;
    rep.n_candidates = d;
    rep.cover_size = proper_cover(env, env.root, n, std::max(1, static_cast<int>(eps * n)))
                         .centers.size();

    auto gram = [&](int m) {
        const BallView b = ball(env, env.root, m);
        Eigen::MatrixXd G(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                double s = 0;
                for (auto v : b.members)
                    s += candidates[i][v] * candidates[j][v]
                         * (env.reversible() ? env.vertex_weight[v] : 1.0);
                G(i, j) = G(j, i) = s;
            }
        return G;
    };

    auto analyze = [&](const Eigen::MatrixXd& G, double& det, int& rank,
                       std::vector<double>& eig) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        det = 1.0;
        eig.clear();
        for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;) {
            eig.push_back(es.eigenvalues()(i));
            det *= es.eigenvalues()(i);
        }
        const double emax = eig.empty() ? 0.0 : std::abs(eig.front());
        rank = 0;
        for (double e : eig)
            if (std::abs(e) > 1e-8 * emax && emax > 0) ++rank;
    };

    analyze(gram(n), rep.det_n, rep.rank_n, rep.eig_n);
    analyze(gram(4 * n), rep.det_4n, rep.rank_4n, rep.eig_4n);
    rep.ratio = rep.det_4n != 0 ? rep.det_n / rep.det_4n : 0.0;
    rep.verdict = rep.rank_n < static_cast<int>(d) ? "dependent on B(n)" : "independent";
    return rep;
}

CorrectorResult estimate_corrector(const RootedEnvironment& env, const std::vector<double>& v,
                                   int R, double tol) {
    if (!env.embedded())
        throw std::invalid_argument("estimate_corrector requires an embedded environment");
    std::vector<double> linear(env.num_vertices(), 0.0);
    for (std::int32_t x = 0; x < env.num_vertices(); ++x) {
        const auto c = env.coords_of(x);
        double s = 0;
        for (int j = 0; j < env.meta.d; ++j) s += v[j] * c[j];
        linear[x] = s;
    }

    CorrectorResult out;
    const BallView b = ball(env, env.root, R);
    out.h = dirichlet_solve(env, b, linear, tol);
    out.chi.assign(env.num_vertices(), 0.0);
    for (auto x : b.members) out.chi[x] = out.h.value[x] - linear[x];

    for (int r = 4; r <= R / 2; r *= 2) out.radii.push_back(r);
    for (int r : out.radii) {
        double sup = 0;
        for (std::size_t i = 0; i < b.members.size(); ++i)
            if (b.dist[i] <= r) sup = std::max(sup, std::abs(out.chi[b.members[i]]));
        out.sup_over_r.push_back(sup / r);
    }
    return out;
}

void write_field(std::ostream& out, const HarmonicField& field, std::uint64_t boundary_hash) {
    out << "field center=" << field.ball.center << " radius=" << field.ball.radius
        << " residual=";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", field.residual);
    out << buf << " boundary_hash=" << boundary_hash << '\n';
    for (auto v : field.ball.members) {
        std::snprintf(buf, sizeof(buf), "h %d %.17g\n", v, field.value[v]);
        out << buf;
    }
}

} // namespace rwre
