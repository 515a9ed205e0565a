#include "edg/condensation.hpp"

#include "edg/errors.hpp"

#include <string>

namespace edg {
namespace {

// Dense copy of a contiguous block of a sparse matrix.
Mat extract_block(const SpMat& m, int row0, int rows, int col0, int cols) {
  Mat out = Mat::Zero(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (SpMat::InnerIterator it(m, col0 + c); it; ++it) {
      const int r = static_cast<int>(it.row()) - row0;
      if (r >= 0 && r < rows)
        out(r, c) = it.value();
    }
  return out;
}

// Dense copy of the (element rows) x (selected columns) slice.
Mat extract_columns(const SpMat& m, int row0, int rows,
                    const std::vector<int>& cols) {
  Mat out = Mat::Zero(rows, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (SpMat::InnerIterator it(m, cols[c]); it; ++it) {
      const int r = static_cast<int>(it.row()) - row0;
      if (r >= 0 && r < rows)
        out(r, static_cast<int>(c)) = it.value();
    }
  return out;
}

void scatter(std::vector<Triplet>& out, const Mat& local, int row0,
             const std::vector<int>& cols) {
  for (int i = 0; i < local.rows(); ++i)
    for (int j = 0; j < local.cols(); ++j)
      out.emplace_back(row0 + i, cols[j], local(i, j));
}

void scatter_contig(std::vector<Triplet>& out, const Mat& local, int row0,
                    int col0) {
  for (int i = 0; i < local.rows(); ++i)
    for (int j = 0; j < local.cols(); ++j)
      out.emplace_back(row0 + i, col0 + j, local(i, j));
}

} // namespace

CondensedOperators condense(const BlockSystem& blocks, const Mesh& mesh,
                            const SpaceSet& sp) {
  CondensedOperators ops;
  ops.n_flux = blocks.n_flux;
  ops.n_scalar = blocks.n_scalar;
  ops.n_trace_free = blocks.n_trace_free;
  ops.elems.resize(mesh.num_elements());

  const int m1 = sp.flux_per_elem;
  const int m2 = sp.scalar_per_elem;

  std::vector<Triplet> tG1, tG2, tG3, tG4;
  Vec H1 = Vec::Zero(blocks.n_flux), H2 = Vec::Zero(blocks.n_scalar);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    ElementFactors& el = ops.elems[e];
    const int f0 = sp.flux_offset(e), s0 = sp.scalar_offset(e);

    for (int d : sp.elem_trace_dofs[e]) {
      const int fr = sp.trace_free_index[d];
      if (fr >= 0)
        el.free_trace.push_back(fr);
    }

    const Mat A1 = extract_block(blocks.A1, f0, m1, f0, m1);
    el.A2 = extract_block(blocks.A2, f0, m1, s0, m2);
    const Mat A4 = extract_block(blocks.A4, s0, m2, s0, m2);
    el.A6 = extract_block(blocks.A6, s0, m2, s0, m2);
    el.A3 = extract_columns(blocks.A3, f0, m1, el.free_trace);
    el.A5 = extract_columns(blocks.A5, s0, m2, el.free_trace);
    el.b2 = blocks.b2.segment(f0, m1);
    el.b34 = blocks.b3.segment(s0, m2) - blocks.b4.segment(s0, m2);

    el.A1_llt.compute(A1);
    if (el.A1_llt.info() != Eigen::Success)
      throw CondensationError(e, "flux mass block not SPD on element " +
                                     std::to_string(e));

    const Mat S = A4 + el.A2.transpose() * el.A1_llt.solve(el.A2);
    el.S_lu.compute(S);
    // PartialPivLU has no rank signal; detect singularity via the diagonal
    // of U. A clean zero pivot is what an exactly singular block produces.
    const Vec upiv = el.S_lu.matrixLU().diagonal();
    for (int i = 0; i < upiv.size(); ++i)
      if (!(std::abs(upiv(i)) > 0.0))
        throw CondensationError(e, "condensed scalar block singular on element " +
                                       std::to_string(e));

    const Mat A1iA3 = el.A1_llt.solve(el.A3);
    const Mat G3 = -el.S_lu.solve(el.A5 - el.A2.transpose() * A1iA3);
    const Mat G4 = el.S_lu.solve(el.A6);
    const Mat G1 = el.A1_llt.solve(el.A2 * G3) - A1iA3;
    const Mat G2 = el.A1_llt.solve(el.A2 * G4);
    const Vec h2 = el.S_lu.solve(el.b34 + el.A2.transpose() * el.A1_llt.solve(el.b2));
    const Vec h1 = el.A1_llt.solve(el.A2 * h2 - el.b2);

    scatter(tG1, G1, f0, el.free_trace);
    scatter_contig(tG2, G2, f0, s0);
    scatter(tG3, G3, s0, el.free_trace);
    scatter_contig(tG4, G4, s0, s0);
    H1.segment(f0, m1) = h1;
    H2.segment(s0, m2) = h2;
  }

  auto make = [](int rows, int cols, const std::vector<Triplet>& ts) {
    SpMat m(rows, cols);
    m.setFromTriplets(ts.begin(), ts.end());
    return m;
  };
  ops.G1 = make(blocks.n_flux, blocks.n_trace_free, tG1);
  ops.G2 = make(blocks.n_flux, blocks.n_scalar, tG2);
  ops.G3 = make(blocks.n_scalar, blocks.n_trace_free, tG3);
  ops.G4 = make(blocks.n_scalar, blocks.n_scalar, tG4);
  ops.H1 = H1;
  ops.H2 = H2;

  ops.G5 = blocks.A3.transpose() * ops.G1 + blocks.A7 * ops.G3 - blocks.A8;
  ops.G6 = blocks.A3.transpose() * ops.G2 + blocks.A7 * ops.G4;
  ops.H3 = blocks.b_trace - blocks.A3.transpose() * H1 - blocks.A7 * H2;

  return ops;
}

ReconstructedFields reconstruct(const CondensedOperators& ops,
                                const Vec& trace, const Vec& control) {
  ReconstructedFields out;
  out.flux = Vec::Zero(ops.n_flux);
  out.scalar = Vec::Zero(ops.n_scalar);

  const int ne = static_cast<int>(ops.elems.size());
  const int m1 = ops.n_flux / ne;
  const int m2 = ops.n_scalar / ne;

  for (int e = 0; e < ne; ++e) {
    const ElementFactors& el = ops.elems[e];
    const int f0 = e * m1, s0 = e * m2;

    Vec ce(el.free_trace.size());
    for (std::size_t i = 0; i < el.free_trace.size(); ++i)
      ce(static_cast<int>(i)) = trace(el.free_trace[i]);
    const Vec ze = control.segment(s0, m2);

    const Vec A1iA3c = el.A1_llt.solve(el.A3 * ce);
    const Vec A1ib2 = el.A1_llt.solve(el.b2);
    const Vec be = el.S_lu.solve(el.b34 + el.A2.transpose() * A1ib2 -
                                 (el.A5 * ce - el.A2.transpose() * A1iA3c) +
                                 el.A6 * ze);
    const Vec ae = el.A1_llt.solve(el.A2 * be - el.A3 * ce - el.b2);

    out.flux.segment(f0, m1) = ae;
    out.scalar.segment(s0, m2) = be;
  }
  return out;
}

} // namespace edg
