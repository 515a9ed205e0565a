#include "edg/assembly.hpp"

#include "edg/basis.hpp"
#include "edg/errors.hpp"
#include "edg/quadrature.hpp"

#include <Eigen/Dense>
#include <ostream>
#include <string>
#include <vector>

namespace edg {
namespace {

struct ElementGeom {
  Vec2 v0;
  Eigen::Matrix2d J;
  Eigen::Matrix2d Jinv;
  double detJ = 0.0;
};

ElementGeom element_geom(const Mesh& mesh, int e) {
  ElementGeom g;
  g.v0 = mesh.element_vertex(e, 0);
  const Vec2 d1 = mesh.element_vertex(e, 1) - g.v0;
  const Vec2 d2 = mesh.element_vertex(e, 2) - g.v0;
  g.J << d1.x(), d2.x(), d1.y(), d2.y();
  g.detJ = g.J.determinant();
  g.Jinv = g.J.inverse();
  return g;
}

// Shared evaluation context: bases, rules and reference-point caches for one
// (mesh, k) pair.
struct Context {
  const Mesh& mesh;
  const SpaceSet& sp;
  const EdgParams& par;
  double h;
  double st1; // 1/h + tau1

  TriangleBasis scal;  // P_{k+1}
  TriangleBasis fluxc; // P_k, one vector component
  EdgeBasis trace;     // P_{k+1} on the face parameter

  QuadratureRule vol;
  EdgeRule edge;

  // Reference values at volume quadrature points (column per point).
  Mat sval_v, sgx_r, sgy_r; // scalar values and reference gradients
  Mat fval_v, fgx_r, fgy_r; // flux component values and reference gradients
  Mat psi_e;                // trace basis at edge quadrature points

  int m1c, m2, nqv, nqe, ntf;

  Context(const Mesh& mesh_, const SpaceSet& sp_, const EdgParams& par_)
      : mesh(mesh_), sp(sp_), par(par_), h(mesh_.h),
        st1(1.0 / mesh_.h + par_.tau1), scal(sp_.k + 1), fluxc(sp_.k),
        trace(sp_.k + 1), vol(triangle_quadrature(2 * (sp_.k + 2))),
        edge(edge_quadrature(2 * (sp_.k + 2))) {
    m1c = fluxc.size();
    m2 = scal.size();
    nqv = static_cast<int>(vol.points.size());
    nqe = static_cast<int>(edge.points.size());
    ntf = sp.trace_nodes_per_face;

    sval_v.resize(m2, nqv);
    sgx_r.resize(m2, nqv);
    sgy_r.resize(m2, nqv);
    fval_v.resize(m1c, nqv);
    fgx_r.resize(m1c, nqv);
    fgy_r.resize(m1c, nqv);
    for (int q = 0; q < nqv; ++q) {
      const BasisEval se = scal.eval(vol.points[q]);
      sval_v.col(q) = se.values;
      sgx_r.col(q) = se.gradients.col(0);
      sgy_r.col(q) = se.gradients.col(1);
      const BasisEval fe = fluxc.eval(vol.points[q]);
      fval_v.col(q) = fe.values;
      fgx_r.col(q) = fe.gradients.col(0);
      fgy_r.col(q) = fe.gradients.col(1);
    }
    psi_e.resize(ntf, nqe);
    for (int q = 0; q < nqe; ++q)
      psi_e.col(q) = trace.eval(edge.points[q]);
  }

  double tau2(double beta_n, Tau2Rule rule) const {
    if (rule == Tau2Rule::from_params && par.tau2_override)
      return *par.tau2_override;
    return par.tau1 - beta_n;
  }

  // Physical gradients: rows of (gx, gy) are mapped with Jinv^T.
  void physical_grads(const ElementGeom& g, const Mat& gx_r, const Mat& gy_r,
                      Mat& gx, Mat& gy) const {
    gx = g.Jinv(0, 0) * gx_r + g.Jinv(1, 0) * gy_r;
    gy = g.Jinv(0, 1) * gx_r + g.Jinv(1, 1) * gy_r;
  }

  // Basis values of one element at arbitrary physical points.
  void side_values(const ElementGeom& g, const std::vector<Vec2>& pts,
                   Mat& sval, Mat& fval, Mat& fvn, const Vec2& normal) const {
    const int nq = static_cast<int>(pts.size());
    sval.resize(m2, nq);
    fval.resize(m1c, nq);
    for (int q = 0; q < nq; ++q) {
      const Vec2 r = g.Jinv * (pts[q] - g.v0);
      sval.col(q) = scal.eval(r).values;
      fval.col(q) = fluxc.eval(r).values;
    }
    // Normal trace of the vector basis: component block c contributes n_c.
    fvn.resize(2 * m1c, nq);
    fvn.topRows(m1c) = normal.x() * fval;
    fvn.bottomRows(m1c) = normal.y() * fval;
  }
};

void scatter_dense(std::vector<Triplet>& out, const Mat& local, int row0,
                   int col0) {
  for (int i = 0; i < local.rows(); ++i)
    for (int j = 0; j < local.cols(); ++j)
      out.emplace_back(row0 + i, col0 + j, local(i, j));
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& ts) {
  SpMat m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  return m;
}

} // namespace

EdgParams params_from(const ProblemSpec& spec) {
  EdgParams par;
  par.beta = spec.beta;
  par.div_beta = spec.div_beta;
  par.tau1 = spec.tau1;
  par.gamma = spec.gamma;
  return par;
}

AssembledSystem assemble_all(const Mesh& mesh, const SpaceSet& sp,
                             const EdgParams& par, const ProblemData& data,
                             Tau2Rule tau2rule) {
  Context ctx(mesh, sp, par);
  const int m1c = ctx.m1c, m2 = ctx.m2, m1 = 2 * m1c;
  const int nq = ctx.nqv, nqe = ctx.nqe, ntf = ctx.ntf;

  AssembledSystem out;
  out.ghat = interpolate_boundary(data.g, sp);
  const Vec& ghat = out.ghat;

  std::vector<Triplet> tA1, tA2, tA3, tA4, tA5, tA6, tA7, tA8, tCtr;
  std::vector<Triplet> tA4a, tA5a, tA7a, tA8a;
  Vec b1 = Vec::Zero(sp.n_scalar), b2 = Vec::Zero(sp.n_flux);
  Vec b3 = Vec::Zero(sp.n_scalar), b4 = Vec::Zero(sp.n_scalar);
  Vec btr = Vec::Zero(sp.n_trace_free), ctr_con = Vec::Zero(sp.n_trace_free);

  // ---- volume sweep -------------------------------------------------------
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeom g = element_geom(mesh, e);
    const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);

    Vec wq(nq), divb(nq), fv(nq), ydv(nq);
    Mat beta_q(2, nq);
    for (int q = 0; q < nq; ++q) {
      const Vec2 x = g.v0 + g.J * ctx.vol.points[q];
      wq(q) = ctx.vol.weights[q] * g.detJ;
      const Vec2 b = par.beta(x);
      beta_q.col(q) = b;
      divb(q) = par.div_beta(x);
      fv(q) = data.f(x);
      ydv(q) = data.y_d(x);
    }

    Mat sgx, sgy, fgx, fgy;
    ctx.physical_grads(g, ctx.sgx_r, ctx.sgy_r, sgx, sgy);
    ctx.physical_grads(g, ctx.fgx_r, ctx.fgy_r, fgx, fgy);

    const Mat mass_c = ctx.fval_v * wq.asDiagonal() * ctx.fval_v.transpose();
    Mat A1_local = Mat::Zero(m1, m1);
    A1_local.topLeftCorner(m1c, m1c) = mass_c;
    A1_local.bottomRightCorner(m1c, m1c) = mass_c;

    // A2(i,j) = (phi_j, div bphi_i): component block c uses d/dx_c.
    Mat A2_local(m1, m2);
    A2_local.topRows(m1c) = fgx * wq.asDiagonal() * ctx.sval_v.transpose();
    A2_local.bottomRows(m1c) = fgy * wq.asDiagonal() * ctx.sval_v.transpose();

    // beta.grad of the scalar test functions.
    const Mat bg = sgx * beta_q.row(0).asDiagonal() + sgy * beta_q.row(1).asDiagonal();
    const Mat bgW = bg * wq.asDiagonal() * ctx.sval_v.transpose();
    const Mat mass_divb =
        ctx.sval_v * (wq.array() * divb.array()).matrix().asDiagonal() *
        ctx.sval_v.transpose();
    const Mat A4_vol = -bgW - mass_divb;  // -(phi_j, div(beta phi_i))
    const Mat A4a_vol = bgW;              // +(beta phi_j, grad phi_i)

    const Mat A6_local = ctx.sval_v * wq.asDiagonal() * ctx.sval_v.transpose();

    scatter_dense(tA1, A1_local, f0, f0);
    scatter_dense(tA2, A2_local, f0, s0);
    scatter_dense(tA4, A4_vol, s0, s0);
    scatter_dense(tA4a, A4a_vol, s0, s0);
    scatter_dense(tA6, A6_local, s0, s0);

    b1.segment(s0, m2) += ctx.sval_v * (wq.array() * ydv.array()).matrix();
    b3.segment(s0, m2) += ctx.sval_v * (wq.array() * fv.array()).matrix();
  }

  // ---- face sweep ---------------------------------------------------------
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    const Vec2 lo = mesh.vertex(face.v_lo), hi = mesh.vertex(face.v_hi);
    const double len = (hi - lo).norm();

    std::vector<Vec2> pts(nqe);
    Vec wq(nqe);
    Mat beta_q(2, nqe);
    for (int q = 0; q < nqe; ++q) {
      pts[q] = lo + ctx.edge.points[q] * (hi - lo);
      wq(q) = ctx.edge.weights[q] * len;
      beta_q.col(q) = par.beta(pts[q]);
    }

    const std::vector<int>& fdofs = sp.face_trace_dofs[f];

    for (int side = 0; side < face.n_sides; ++side) {
      const int e = face.sides[side].element;
      const int s = face.sides[side].local_side;
      const ElementGeom g = element_geom(mesh, e);
      const Vec2 n = mesh.outward_normal(e, s);
      const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);

      Mat sval, fval, fvn;
      ctx.side_values(g, pts, sval, fval, fvn, n);

      Vec bn(nqe), st2(nqe);
      for (int q = 0; q < nqe; ++q) {
        bn(q) = beta_q.col(q).dot(n);
        if (par.tau1 - 0.5 * bn(q) <= 0.0)
          throw StabilizationError(
              f, "stabilization condition tau1 - beta.n/2 > 0 violated at face " +
                     std::to_string(f));
        st2(q) = 1.0 / ctx.h + ctx.tau2(bn(q), tau2rule);
      }

      const Mat A3_local = fvn * wq.asDiagonal() * ctx.psi_e.transpose();
      const Mat A4f_local =
          ctx.st1 * (sval * wq.asDiagonal() * sval.transpose());
      const Mat A5_local =
          sval * ((bn.array() - ctx.st1) * wq.array()).matrix().asDiagonal() *
          ctx.psi_e.transpose();
      const Mat A8_local =
          ctx.st1 * (ctx.psi_e * wq.asDiagonal() * ctx.psi_e.transpose());
      const Mat Ctr_local = ctx.psi_e *
                            (bn.array() * wq.array()).matrix().asDiagonal() *
                            ctx.psi_e.transpose();

      const Mat A7_local =
          ctx.st1 * (ctx.psi_e * wq.asDiagonal() * sval.transpose());

      const Mat A4a_local =
          sval * (st2.array() * wq.array()).matrix().asDiagonal() *
          sval.transpose();
      const Mat A5a_local =
          -(sval *
            ((bn.array() + st2.array()) * wq.array()).matrix().asDiagonal() *
            ctx.psi_e.transpose());
      const Mat A7a_local = ctx.psi_e *
                            (st2.array() * wq.array()).matrix().asDiagonal() *
                            sval.transpose();
      const Mat A8a_local = ctx.psi_e *
                            (st2.array() * wq.array()).matrix().asDiagonal() *
                            ctx.psi_e.transpose();

      scatter_dense(tA4, A4f_local, s0, s0);
      scatter_dense(tA4a, A4a_local, s0, s0);

      for (int a = 0; a < ntf; ++a) {
        const int dof = fdofs[a];
        const int fr = sp.trace_free_index[dof];
        const int co = sp.trace_con_index[dof];

        if (fr >= 0) {
          for (int i = 0; i < m1; ++i)
            tA3.emplace_back(f0 + i, fr, A3_local(i, a));
          for (int i = 0; i < m2; ++i) {
            tA5.emplace_back(s0 + i, fr, A5_local(i, a));
            tA5a.emplace_back(s0 + i, fr, A5a_local(i, a));
            tA7.emplace_back(fr, s0 + i, A7_local(a, i));
            tA7a.emplace_back(fr, s0 + i, A7a_local(a, i));
          }
          for (int b = 0; b < ntf; ++b) {
            const int dofb = fdofs[b];
            const int frb = sp.trace_free_index[dofb];
            if (frb >= 0) {
              tA8.emplace_back(fr, frb, A8_local(a, b));
              tA8a.emplace_back(fr, frb, A8a_local(a, b));
              tCtr.emplace_back(fr, frb, Ctr_local(a, b));
            } else {
              const double gv = ghat(sp.trace_con_index[dofb]);
              btr(fr) += A8_local(a, b) * gv;
              ctr_con(fr) += Ctr_local(a, b) * gv;
            }
          }
        } else {
          const double gv = ghat(co);
          b2.segment(f0, m1) += A3_local.col(a) * gv;
          b4.segment(s0, m2) += A5_local.col(a) * gv;
        }
      }
    }
  }

  BlockSystem& bs = out.state;
  bs.n_flux = sp.n_flux;
  bs.n_scalar = sp.n_scalar;
  bs.n_trace_free = sp.n_trace_free;
  bs.A1 = from_triplets(sp.n_flux, sp.n_flux, tA1);
  bs.A2 = from_triplets(sp.n_flux, sp.n_scalar, tA2);
  bs.A3 = from_triplets(sp.n_flux, sp.n_trace_free, tA3);
  bs.A4 = from_triplets(sp.n_scalar, sp.n_scalar, tA4);
  bs.A5 = from_triplets(sp.n_scalar, sp.n_trace_free, tA5);
  bs.A6 = from_triplets(sp.n_scalar, sp.n_scalar, tA6);
  bs.A7 = from_triplets(sp.n_trace_free, sp.n_scalar, tA7);
  bs.A8 = from_triplets(sp.n_trace_free, sp.n_trace_free, tA8);
  bs.b1 = b1;
  bs.b2 = b2;
  bs.b3 = b3;
  bs.b4 = b4;
  bs.b_trace = btr;

  out.adjoint.A4 = from_triplets(sp.n_scalar, sp.n_scalar, tA4a);
  out.adjoint.A5 = from_triplets(sp.n_scalar, sp.n_trace_free, tA5a);
  out.adjoint.A7 = from_triplets(sp.n_trace_free, sp.n_scalar, tA7a);
  out.adjoint.A8 = from_triplets(sp.n_trace_free, sp.n_trace_free, tA8a);
  out.Ctr = from_triplets(sp.n_trace_free, sp.n_trace_free, tCtr);
  out.ctr_con = ctr_con;

  return out;
}

BlockSystem assemble_blocks(const Mesh& mesh, const SpaceSet& sp,
                            const EdgParams& par, const ProblemData& data) {
  return assemble_all(mesh, sp, par, data, Tau2Rule::from_params).state;
}

namespace {

double trace_value(const SpaceSet& sp, const Vec& coeffs,
                   const std::vector<int>& fdofs, const Mat& psi, int q) {
  double v = 0.0;
  for (int a = 0; a < psi.rows(); ++a) {
    const int fr = sp.trace_free_index[fdofs[a]];
    if (fr >= 0)
      v += coeffs(fr) * psi(a, q);
  }
  return v;
}

enum class Family { state, adjoint };

double apply_form(Family fam, const DiscreteTriple& u, const DiscreteTriple& v,
                  const Mesh& mesh, const SpaceSet& sp, const EdgParams& par) {
  Context ctx(mesh, sp, par);
  const int m1c = ctx.m1c, m2 = ctx.m2;
  const int nq = ctx.nqv, nqe = ctx.nqe;
  double acc = 0.0;

  // Volume terms: (uq, vr) - (uw, div vr) - (uq -/+ beta uw, grad vw)
  // and for the state family the reaction term -(div beta uw, vw).
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeom g = element_geom(mesh, e);
    const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);

    Mat sgx, sgy, fgx, fgy;
    ctx.physical_grads(g, ctx.sgx_r, ctx.sgy_r, sgx, sgy);
    ctx.physical_grads(g, ctx.fgx_r, ctx.fgy_r, fgx, fgy);

    const Vec uqx = u.flux.segment(f0, m1c), uqy = u.flux.segment(f0 + m1c, m1c);
    const Vec vqx = v.flux.segment(f0, m1c), vqy = v.flux.segment(f0 + m1c, m1c);
    const Vec uw = u.scalar.segment(s0, m2), vw = v.scalar.segment(s0, m2);

    for (int q = 0; q < nq; ++q) {
      const Vec2 x = g.v0 + g.J * ctx.vol.points[q];
      const double w = ctx.vol.weights[q] * g.detJ;
      const Vec2 beta = par.beta(x);

      const double uq1 = uqx.dot(ctx.fval_v.col(q));
      const double uq2 = uqy.dot(ctx.fval_v.col(q));
      const double div_vr = vqx.dot(fgx.col(q)) + vqy.dot(fgy.col(q));
      const double uwv = uw.dot(ctx.sval_v.col(q));
      const double vr1 = vqx.dot(ctx.fval_v.col(q));
      const double vr2 = vqy.dot(ctx.fval_v.col(q));
      const Vec2 grad_vw(vw.dot(sgx.col(q)), vw.dot(sgy.col(q)));

      double term = uq1 * vr1 + uq2 * vr2 - uwv * div_vr;
      if (fam == Family::state) {
        term -= (uq1 + beta.x() * uwv) * grad_vw.x() +
                (uq2 + beta.y() * uwv) * grad_vw.y();
        term -= par.div_beta(x) * uwv * vw.dot(ctx.sval_v.col(q));
      } else {
        term -= (uq1 - beta.x() * uwv) * grad_vw.x() +
                (uq2 - beta.y() * uwv) * grad_vw.y();
      }
      acc += w * term;
    }
  }

  // Face terms.
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    const Vec2 lo = mesh.vertex(face.v_lo), hi = mesh.vertex(face.v_hi);
    const double len = (hi - lo).norm();

    std::vector<Vec2> pts(nqe);
    for (int q = 0; q < nqe; ++q)
      pts[q] = lo + ctx.edge.points[q] * (hi - lo);

    const std::vector<int>& fdofs = sp.face_trace_dofs[f];

    for (int side = 0; side < face.n_sides; ++side) {
      const int e = face.sides[side].element;
      const int s = face.sides[side].local_side;
      const ElementGeom g = element_geom(mesh, e);
      const Vec2 n = mesh.outward_normal(e, s);
      const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);

      Mat sval, fval, fvn;
      ctx.side_values(g, pts, sval, fval, fvn, n);

      const Vec uw = u.scalar.segment(s0, m2), vw = v.scalar.segment(s0, m2);

      for (int q = 0; q < nqe; ++q) {
        const double w = ctx.edge.weights[q] * len;
        const double bn = par.beta(pts[q]).dot(n);
        const double st2 = 1.0 / ctx.h + ctx.tau2(bn, Tau2Rule::from_params);
        const double stab = fam == Family::state ? ctx.st1 : st2;

        const double u_qn = u.flux.segment(f0, 2 * m1c).dot(fvn.col(q));
        const double uwv = uw.dot(sval.col(q));
        const double vwv = vw.dot(sval.col(q));

        if (face.boundary()) {
          acc += w * (u_qn + stab * uwv) * vwv;
          continue;
        }

        const double v_qn = v.flux.segment(f0, 2 * m1c).dot(fvn.col(q));
        const double uhat = trace_value(sp, u.trace, fdofs, ctx.psi_e, q);
        const double vhat = trace_value(sp, v.trace, fdofs, ctx.psi_e, q);

        if (fam == Family::state) {
          acc += w * (uhat * v_qn + (u_qn + stab * uwv) * vwv +
                      (bn - stab) * uhat * vwv -
                      (u_qn + bn * uhat + stab * (uwv - uhat)) * vhat);
        } else {
          acc += w * (uhat * v_qn + (u_qn + stab * uwv) * vwv -
                      (bn + stab) * uhat * vwv -
                      (u_qn - bn * uhat + stab * (uwv - uhat)) * vhat);
        }
      }
    }
  }

  return acc;
}

} // namespace

double apply_B1(const DiscreteTriple& u, const DiscreteTriple& v,
                const Mesh& mesh, const SpaceSet& sp, const EdgParams& par) {
  return apply_form(Family::state, u, v, mesh, sp, par);
}

double apply_B2(const DiscreteTriple& u, const DiscreteTriple& v,
                const Mesh& mesh, const SpaceSet& sp, const EdgParams& par) {
  return apply_form(Family::adjoint, u, v, mesh, sp, par);
}

void dump_matrix(const SpMat& m, std::ostream& os) {
  os.precision(17);
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace edg
