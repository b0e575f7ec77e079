#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/QR>

#include "cad2gis/convert.hpp"
#include "cad2gis/error.hpp"
#include "cad2gis/geometry.hpp"
#include "cad2gis/profile.hpp"

namespace cad2gis {

struct ControlPointPair {
  Point2 source;  // drawing units
  Point2 target;  // target CRS units
  std::string label;
};

// x -> scale * R(rotation) * x + translation. Rotation in radians, scale > 0.
template <typename Scalar>
struct SimilarityTransform {
  Scalar scale = Scalar(1);
  Scalar rotation = Scalar(0);
  Vec2<Scalar> translation = Vec2<Scalar>::Zero();

  Eigen::Matrix<Scalar, 2, 2> linear() const {
    return scale * Eigen::Rotation2D<Scalar>(rotation).toRotationMatrix();
  }
  Vec2<Scalar> operator()(const Vec2<Scalar>& p) const { return linear() * p + translation; }
};

// x -> [a b; d e] x + [c; f], stored row-wise as [a b c; d e f].
template <typename Scalar>
struct AffineTransform {
  Eigen::Matrix<Scalar, 2, 3> coefficients = Eigen::Matrix<Scalar, 2, 3>::Identity();

  Eigen::Matrix<Scalar, 2, 2> linear() const { return coefficients.template leftCols<2>(); }
  Vec2<Scalar> offset() const { return coefficients.col(2); }
  Scalar determinant() const { return linear().determinant(); }
  Vec2<Scalar> operator()(const Vec2<Scalar>& p) const { return linear() * p + offset(); }
};

template <typename Scalar>
struct ResidualReport {
  std::vector<Scalar> per_pair;
  Scalar rms = Scalar(0);
  Scalar max = Scalar(0);
};

// Least-squares similarity between column-wise 2xN point sets. Centred closed form:
// with p, q the centred source/target points, s*cos = sum(p.q)/sum|p|^2 and
// s*sin = sum(p x q)/sum|p|^2. The fit is reflection-free by construction.
template <typename DerivedSrc, typename DerivedDst>
SimilarityTransform<typename DerivedSrc::Scalar> estimate_similarity(
    const Eigen::MatrixBase<DerivedSrc>& source, const Eigen::MatrixBase<DerivedDst>& target) {
  using Scalar = typename DerivedSrc::Scalar;
  static_assert(DerivedSrc::RowsAtCompileTime == 2, "points are 2xN column sets");
  if (source.cols() != target.cols()) throw EstimationError("source/target point counts differ");
  if (source.cols() < 2) throw EstimationError("similarity fit needs at least 2 control point pairs");

  const Vec2<Scalar> src_mean = source.rowwise().mean();
  const Vec2<Scalar> dst_mean = target.rowwise().mean();
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> p = source.colwise() - src_mean;
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> q = target.colwise() - dst_mean;

  const Scalar spread = p.squaredNorm();
  if (!(spread > Scalar(0))) throw EstimationError("all source control points are coincident");
  const Scalar dot = (p.array() * q.array()).sum();
  const Scalar cross = (p.row(0).array() * q.row(1).array() - p.row(1).array() * q.row(0).array()).sum();
  const Scalar k = std::hypot(dot, cross);
  if (!(k > Scalar(0))) throw EstimationError("target control points give a zero-scale fit");

  SimilarityTransform<Scalar> t;
  t.scale = k / spread;
  t.rotation = std::atan2(cross, dot);
  t.translation = dst_mean - t.linear() * src_mean;
  return t;
}

// Least-squares affine map. In centred coordinates the offset decouples, leaving a 2-column
// least-squares problem for the linear part; the offset then maps mean to mean.
template <typename DerivedSrc, typename DerivedDst>
AffineTransform<typename DerivedSrc::Scalar> estimate_affine(
    const Eigen::MatrixBase<DerivedSrc>& source, const Eigen::MatrixBase<DerivedDst>& target) {
  using Scalar = typename DerivedSrc::Scalar;
  if (source.cols() != target.cols()) throw EstimationError("source/target point counts differ");
  if (source.cols() < 3) throw EstimationError("affine fit needs at least 3 control point pairs");

  const Vec2<Scalar> src_mean = source.rowwise().mean();
  const Vec2<Scalar> dst_mean = target.rowwise().mean();
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> p = source.colwise() - src_mean;
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> q = target.colwise() - dst_mean;

  const Eigen::Matrix<Scalar, 2, 2> scatter = p * p.transpose();
  const Scalar trace = scatter.trace();
  if (!(scatter.determinant() > Scalar(1e-12) * trace * trace)) {
    throw EstimationError("source control points are collinear or coincident");
  }
  // Least squares p^T L^T = q^T by QR, which avoids squaring the condition number.
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 2> lt =
      p.transpose().colPivHouseholderQr().solve(q.transpose().eval());

  AffineTransform<Scalar> t;
  const Eigen::Matrix<Scalar, 2, 2> linear = lt.transpose();
  t.coefficients.template leftCols<2>() = linear;
  t.coefficients.col(2) = dst_mean - linear * src_mean;
  return t;
}

template <typename Transform, typename DerivedSrc, typename DerivedDst>
ResidualReport<typename DerivedSrc::Scalar> residuals(const Transform& transform,
                                                      const Eigen::MatrixBase<DerivedSrc>& source,
                                                      const Eigen::MatrixBase<DerivedDst>& target) {
  using Scalar = typename DerivedSrc::Scalar;
  if (source.cols() == 0) throw EstimationError("no control point pairs to evaluate");
  ResidualReport<Scalar> r;
  Scalar sum_sq(0);
  for (Eigen::Index i = 0; i < source.cols(); ++i) {
    const Scalar d = (transform(Vec2<Scalar>(source.col(i))) - Vec2<Scalar>(target.col(i))).norm();
    r.per_pair.push_back(d);
    sum_sq += d * d;
    r.max = std::max(r.max, d);
  }
  r.rms = std::sqrt(sum_sq / Scalar(source.cols()));
  return r;
}

// Column-wise matrices of the pair coordinates.
Eigen::Matrix2Xd source_points(std::span<const ControlPointPair> pairs);
Eigen::Matrix2Xd target_points(std::span<const ControlPointPair> pairs);

SimilarityTransform<double> estimate_similarity(std::span<const ControlPointPair> pairs);
AffineTransform<double> estimate_affine(std::span<const ControlPointPair> pairs);

using GeoTransform = std::variant<SimilarityTransform<double>, AffineTransform<double>>;

GeoTransform estimate_transform(std::span<const ControlPointPair> pairs, TransformModel model);

ResidualReport<double> residuals(const GeoTransform& transform, std::span<const ControlPointPair> pairs);

Point2 apply(const GeoTransform& transform, const Point2& p);

// Maps every coordinate and stamps the CRS. Throws GeometryError if already georeferenced.
FeatureSet apply_transform(const FeatureSet& features, const GeoTransform& transform, const Crs& crs);

// CSV with header src_x,src_y,dst_x,dst_y[,label]; LF or CRLF. Throws ParseError.
std::vector<ControlPointPair> parse_control_points(std::string_view csv);

}  // namespace cad2gis
