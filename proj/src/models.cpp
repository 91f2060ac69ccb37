#include "kgealign/models.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

struct KindInfo {
  ModelKind kind;
  const char* name;
};

constexpr KindInfo kKinds[kNumModelKinds] = {
    {ModelKind::transe, "transe"},   {ModelKind::transh, "transh"},
    {ModelKind::transr, "transr"},   {ModelKind::transd, "transd"},
    {ModelKind::transf, "transf"},   {ModelKind::distmult, "distmult"},
    {ModelKind::complex_, "complex"}, {ModelKind::hole, "hole"},
    {ModelKind::rotate, "rotate"},   {ModelKind::simple, "simple"},
    {ModelKind::quate, "quate"},     {ModelKind::se, "se"},
    {ModelKind::mure, "mure"},       {ModelKind::boxe, "boxe"},
    {ModelKind::crosse, "crosse"},
};

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

using Span = std::span<const double>;

double dot(Span a, Span b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(Span a) { return std::sqrt(dot(a, a)); }

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const char* model_name(ModelKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "?";
}

std::vector<std::string> model_names() {
  std::vector<std::string> names;
  names.reserve(kNumModelKinds);
  for (const auto& k : kKinds) names.emplace_back(k.name);
  return names;
}

ModelKind parse_model_kind(const std::string& name) {
  const std::string lowered = to_lower(name);
  for (const auto& k : kKinds)
    if (lowered == k.name) return k.kind;
  std::ostringstream msg;
  msg << "unknown model '" << name << "'; supported models:";
  for (const auto& k : kKinds) msg << " " << k.name;
  throw invalid_error(msg.str());
}

NamedTensor& ModelParams::tensor(const std::string& name) {
  for (auto& t : tensors)
    if (t.name == name) return t;
  throw invalid_error("no tensor named '" + name + "'");
}

const NamedTensor& ModelParams::tensor(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw invalid_error("no tensor named '" + name + "'");
}

std::span<double> SparseGrad::slot(std::size_t tensor, std::size_t row, std::size_t cols) {
  auto it = std::find_if(slices.begin(), slices.end(), [&](const GradSlice& s) {
    return s.tensor == tensor && s.row == row;
  });
  if (it == slices.end()) {
    auto pos = std::find_if(slices.begin(), slices.end(), [&](const GradSlice& s) {
      return s.tensor > tensor || (s.tensor == tensor && s.row > row);
    });
    it = slices.insert(pos, GradSlice{tensor, row, std::vector<double>(cols, 0.0)});
  }
  return {it->values.data(), it->values.size()};
}

namespace {

std::vector<NamedTensor> model_layout(ModelKind kind, std::size_t n, std::size_t r,
                                      std::size_t d) {
  auto t = [&](const char* name, TensorRole role, std::size_t rows,
               std::size_t cols) -> NamedTensor {
    NamedTensor out;
    out.name = name;
    out.role = role;
    out.rows = rows;
    out.cols = cols;
    out.data.assign(rows * cols, 0.0);
    return out;
  };
  using TR = TensorRole;
  switch (kind) {
    case ModelKind::transe:
    case ModelKind::transf:
    case ModelKind::distmult:
    case ModelKind::hole:
      return {t("entity", TR::entity, n, d), t("relation", TR::relation, r, d)};
    case ModelKind::complex_:
      if (d % 2 != 0)
        throw invalid_error("complex requires dim to be a multiple of 2 (real|imag halves)");
      return {t("entity", TR::entity, n, d), t("relation", TR::relation, r, d)};
    case ModelKind::transh:
      return {t("entity", TR::entity, n, d), t("rel_normal", TR::relation, r, d),
              t("rel_translation", TR::relation, r, d)};
    case ModelKind::transr:
      return {t("entity", TR::entity, n, d), t("rel_matrix", TR::relation, r, d * d),
              t("relation", TR::relation, r, d)};
    case ModelKind::transd:
      return {t("entity", TR::entity, n, d), t("entity_proj", TR::entity, n, d),
              t("relation", TR::relation, r, d), t("relation_proj", TR::relation, r, d)};
    case ModelKind::rotate:
      return {t("entity", TR::entity, n, 2 * d), t("rel_phase", TR::relation, r, d)};
    case ModelKind::simple:
      return {t("entity_head", TR::entity, n, d), t("entity_tail", TR::entity, n, d),
              t("relation", TR::relation, r, d), t("relation_inv", TR::relation, r, d)};
    case ModelKind::quate:
      if (d % 4 != 0)
        throw invalid_error("quate requires dim to be a multiple of 4 (quaternion components)");
      return {t("entity", TR::entity, n, d), t("relation", TR::relation, r, d)};
    case ModelKind::se:
      return {t("entity", TR::entity, n, d), t("rel_matrix1", TR::relation, r, d * d),
              t("rel_matrix2", TR::relation, r, d * d)};
    case ModelKind::mure:
      return {t("entity", TR::entity, n, d), t("entity_bias", TR::entity, n, 1),
              t("rel_scale", TR::relation, r, d), t("rel_translation", TR::relation, r, d)};
    case ModelKind::boxe:
      return {t("entity_base", TR::entity, n, d),   t("entity_bump", TR::entity, n, d),
              t("rel_center1", TR::relation, r, d), t("rel_size1", TR::relation, r, d),
              t("rel_center2", TR::relation, r, d), t("rel_size2", TR::relation, r, d)};
    case ModelKind::crosse:
      return {t("entity", TR::entity, n, d), t("relation", TR::relation, r, d),
              t("rel_interact", TR::relation, r, d), t("global_bias", TR::global, 1, d)};
  }
  throw invalid_error("unhandled model kind");
}

bool is_translation_family(ModelKind kind) {
  return kind == ModelKind::transe || kind == ModelKind::transh ||
         kind == ModelKind::transr || kind == ModelKind::transd;
}

}  // namespace

ModelParams init_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations,
                        std::size_t dim, Rng& rng) {
  if (dim < 1) throw invalid_error("dim must be >= 1");
  if (num_entities < 1 || num_relations < 1)
    throw invalid_error("need at least one entity and one relation");

  ModelParams params;
  params.kind = kind;
  params.dim = dim;
  params.num_entities = num_entities;
  params.num_relations = num_relations;
  params.tensors = model_layout(kind, num_entities, num_relations, dim);

  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  for (auto& tensor : params.tensors) {
    const bool phases = (kind == ModelKind::rotate && tensor.name == "rel_phase");
    const double lo = phases ? -std::numbers::pi : -bound;
    const double hi = phases ? std::numbers::pi : bound;
    for (auto& v : tensor.data) v = rng.uniform(lo, hi);
  }

  // Classic translation-model recipe: entity embeddings start on the unit
  // sphere.
  if (is_translation_family(kind)) {
    auto& entity = params.tensors[0];
    for (std::size_t i = 0; i < entity.rows; ++i) {
      auto row = entity.row(i);
      const double n = norm2(row);
      if (n > 0.0)
        for (auto& v : row) v /= n;
    }
  }

  constrain(params);
  return params;
}

void constrain(ModelParams& params) {
  switch (params.kind) {
    case ModelKind::transe:
    case ModelKind::transr:
    case ModelKind::transd: {
      auto& entity = params.tensors[0];
      for (std::size_t i = 0; i < entity.rows; ++i) {
        auto row = entity.row(i);
        const double n = norm2(row);
        if (n > 1.0)
          for (auto& v : row) v /= n;
      }
      break;
    }
    case ModelKind::transh: {
      auto& entity = params.tensors[0];
      for (std::size_t i = 0; i < entity.rows; ++i) {
        auto row = entity.row(i);
        const double n = norm2(row);
        if (n > 1.0)
          for (auto& v : row) v /= n;
      }
      auto& normal = params.tensor("rel_normal");
      for (std::size_t i = 0; i < normal.rows; ++i) {
        auto row = normal.row(i);
        const double n = norm2(row);
        if (n > 0.0)
          for (auto& v : row) v /= n;
      }
      break;
    }
    case ModelKind::rotate: {
      auto& phase = params.tensor("rel_phase");
      constexpr double two_pi = 2.0 * std::numbers::pi;
      for (auto& v : phase.data) {
        double w = std::fmod(v + std::numbers::pi, two_pi);
        if (w < 0.0) w += two_pi;
        v = w - std::numbers::pi;
      }
      break;
    }
    case ModelKind::boxe: {
      for (const char* name : {"rel_size1", "rel_size2"}) {
        auto& size = params.tensor(name);
        for (auto& v : size.data) v = std::fabs(v);
      }
      break;
    }
    default:
      break;
  }
}

bool all_finite(const ModelParams& params) {
  for (const auto& t : params.tensors)
    for (double v : t.data)
      if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace {

struct Ids {
  std::size_t h, r, t;
};

void check_range(const ModelParams& p, const Ids& ids) {
  if (ids.h >= p.num_entities || ids.t >= p.num_entities)
    throw invalid_error("entity id out of range");
  if (ids.r >= p.num_relations) throw invalid_error("relation id out of range");
}

// --- TransE ---------------------------------------------------------------

double score_transe(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double u = h[i] + r[i] - t[i];
    acc += p.transe_l1 ? std::fabs(u) : u * u;
  }
  return p.transe_l1 ? -acc : -std::sqrt(acc);
}

void grad_transe(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  std::vector<double> u(d);
  double nsq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    u[i] = h[i] + r[i] - t[i];
    nsq += u[i] * u[i];
  }
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  if (p.transe_l1) {
    for (std::size_t i = 0; i < d; ++i) {
      const double s = sign(u[i]);
      gh[i] += -s;
      gr[i] += -s;
      gt[i] += s;
    }
    return;
  }
  const double n = std::sqrt(nsq);
  if (n == 0.0) return;  // subgradient 0 at the kink
  for (std::size_t i = 0; i < d; ++i) {
    const double v = u[i] / n;
    gh[i] += -v;
    gr[i] += -v;
    gt[i] += v;
  }
}

// --- TransH ---------------------------------------------------------------

double score_transh(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto w = p.tensors[1].row(ids.r);
  const auto dr = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const double wh = dot(w, h);
  const double wt = dot(w, t);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double u = (h[i] - wh * w[i]) + dr[i] - (t[i] - wt * w[i]);
    acc += u * u;
  }
  return -acc;
}

void grad_transh(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto w = p.tensors[1].row(ids.r);
  const auto dr = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  const double wh = dot(w, h);
  const double wt = dot(w, t);
  std::vector<double> u(d);
  for (std::size_t i = 0; i < d; ++i)
    u[i] = (h[i] - wh * w[i]) + dr[i] - (t[i] - wt * w[i]);
  const double wu = dot(Span(w), Span(u));
  double th_w = 0.0;  // w . (t - h)
  for (std::size_t i = 0; i < d; ++i) th_w += w[i] * (t[i] - h[i]);
  auto gh = g.slot(0, ids.h, d);
  auto gt = g.slot(0, ids.t, d);
  auto gw = g.slot(1, ids.r, d);
  auto gd = g.slot(2, ids.r, d);
  for (std::size_t i = 0; i < d; ++i) {
    gh[i] += -2.0 * (u[i] - wu * w[i]);
    gt[i] += 2.0 * (u[i] - wu * w[i]);
    gw[i] += -2.0 * (wu * (t[i] - h[i]) + th_w * u[i]);
    gd[i] += -2.0 * u[i];
  }
}

// --- TransR ---------------------------------------------------------------

double score_transr(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto m = p.tensors[1].row(ids.r);
  const auto r = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double mi = 0.0;
    const double* row = m.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) mi += row[j] * (h[j] - t[j]);
    const double u = mi + r[i];
    acc += u * u;
  }
  return -acc;
}

void grad_transr(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto m = p.tensors[1].row(ids.r);
  const auto r = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  std::vector<double> u(d), diff(d);
  for (std::size_t j = 0; j < d; ++j) diff[j] = h[j] - t[j];
  for (std::size_t i = 0; i < d; ++i) {
    double mi = 0.0;
    const double* row = m.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) mi += row[j] * diff[j];
    u[i] = mi + r[i];
  }
  auto gh = g.slot(0, ids.h, d);
  auto gt = g.slot(0, ids.t, d);
  auto gm = g.slot(1, ids.r, d * d);
  auto gr = g.slot(2, ids.r, d);
  for (std::size_t j = 0; j < d; ++j) {
    double mtu = 0.0;  // (M^T u)_j
    for (std::size_t i = 0; i < d; ++i) mtu += m[i * d + j] * u[i];
    gh[j] += -2.0 * mtu;
    gt[j] += 2.0 * mtu;
  }
  for (std::size_t i = 0; i < d; ++i) {
    gr[i] += -2.0 * u[i];
    for (std::size_t j = 0; j < d; ++j) gm[i * d + j] += -2.0 * u[i] * diff[j];
  }
}

// --- TransD ---------------------------------------------------------------

double score_transd(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto hp = p.tensors[1].row(ids.h);
  const auto t = p.tensors[0].row(ids.t);
  const auto tp = p.tensors[1].row(ids.t);
  const auto r = p.tensors[2].row(ids.r);
  const auto rp = p.tensors[3].row(ids.r);
  const double hph = dot(hp, h);
  const double tpt = dot(tp, t);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double u = (h[i] + hph * rp[i]) + r[i] - (t[i] + tpt * rp[i]);
    acc += u * u;
  }
  return -acc;
}

void grad_transd(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto hp = p.tensors[1].row(ids.h);
  const auto t = p.tensors[0].row(ids.t);
  const auto tp = p.tensors[1].row(ids.t);
  const auto r = p.tensors[2].row(ids.r);
  const auto rp = p.tensors[3].row(ids.r);
  const std::size_t d = h.size();
  const double hph = dot(hp, h);
  const double tpt = dot(tp, t);
  std::vector<double> u(d);
  for (std::size_t i = 0; i < d; ++i)
    u[i] = (h[i] + hph * rp[i]) + r[i] - (t[i] + tpt * rp[i]);
  const double urp = dot(Span(u), rp);
  auto gh = g.slot(0, ids.h, d);
  auto gt = g.slot(0, ids.t, d);
  auto ghp = g.slot(1, ids.h, d);
  auto gtp = g.slot(1, ids.t, d);
  auto gr = g.slot(2, ids.r, d);
  auto grp = g.slot(3, ids.r, d);
  for (std::size_t i = 0; i < d; ++i) {
    gh[i] += -2.0 * (u[i] + urp * hp[i]);
    gt[i] += 2.0 * (u[i] + urp * tp[i]);
    ghp[i] += -2.0 * urp * h[i];
    gtp[i] += 2.0 * urp * t[i];
    gr[i] += -2.0 * u[i];
    grp[i] += -2.0 * (hph - tpt) * u[i];
  }
}

// --- TransF ---------------------------------------------------------------

double score_transf(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    acc += (h[i] + r[i]) * t[i] + (t[i] - r[i]) * h[i];
  return acc;
}

void grad_transf(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t i = 0; i < d; ++i) {
    gh[i] += 2.0 * t[i] - r[i];
    gt[i] += 2.0 * h[i] + r[i];
    gr[i] += t[i] - h[i];
  }
}

// --- DistMult ---------------------------------------------------------------

double score_distmult(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * r[i] * t[i];
  return acc;
}

void grad_distmult(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t i = 0; i < d; ++i) {
    gh[i] += r[i] * t[i];
    gr[i] += h[i] * t[i];
    gt[i] += h[i] * r[i];
  }
}

// --- ComplEx ----------------------------------------------------------------

double score_complex(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t half = h.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = h[i], b = h[half + i];
    const double c = r[i], e = r[half + i];
    const double f = t[i], g2 = t[half + i];
    // Re(h * r * conj(t))
    acc += (a * c - b * e) * f + (a * e + b * c) * g2;
  }
  return acc;
}

void grad_complex(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  const std::size_t half = d / 2;
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t i = 0; i < half; ++i) {
    const double a = h[i], b = h[half + i];
    const double c = r[i], e = r[half + i];
    const double f = t[i], g2 = t[half + i];
    gh[i] += c * f + e * g2;
    gh[half + i] += c * g2 - e * f;
    gr[i] += a * f + b * g2;
    gr[half + i] += a * g2 - b * f;
    gt[i] += a * c - b * e;
    gt[half + i] += a * e + b * c;
  }
}

// --- HolE -------------------------------------------------------------------

double score_hole(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double corr = 0.0;
    for (std::size_t i = 0; i < d; ++i) corr += h[i] * t[(i + k) % d];
    acc += r[k] * corr;
  }
  return acc;
}

void grad_hole(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t k = 0; k < d; ++k) {
    double corr = 0.0;
    for (std::size_t i = 0; i < d; ++i) corr += h[i] * t[(i + k) % d];
    gr[k] += corr;
  }
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += r[k] * t[(i + k) % d];
    gh[i] += s;
  }
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += r[k] * h[(j + d - k) % d];
    gt[j] += s;
  }
}

// --- RotatE -----------------------------------------------------------------

double score_rotate(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto th = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = th.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double a = h[j], b = h[d + j];
    const double c = std::cos(th[j]), s = std::sin(th[j]);
    const double x = a * c - b * s - t[j];
    const double y = a * s + b * c - t[d + j];
    acc += x * x + y * y;
  }
  return -std::sqrt(acc);
}

void grad_rotate(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto th = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = th.size();
  std::vector<double> x(d), y(d), cs(d), sn(d);
  double nsq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double a = h[j], b = h[d + j];
    cs[j] = std::cos(th[j]);
    sn[j] = std::sin(th[j]);
    x[j] = a * cs[j] - b * sn[j] - t[j];
    y[j] = a * sn[j] + b * cs[j] - t[d + j];
    nsq += x[j] * x[j] + y[j] * y[j];
  }
  const double n = std::sqrt(nsq);
  if (n == 0.0) return;
  auto gh = g.slot(0, ids.h, 2 * d);
  auto gt = g.slot(0, ids.t, 2 * d);
  auto gth = g.slot(1, ids.r, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double a = h[j], b = h[d + j];
    const double gx = -x[j] / n, gy = -y[j] / n;
    gh[j] += gx * cs[j] + gy * sn[j];
    gh[d + j] += -gx * sn[j] + gy * cs[j];
    gt[j] += -gx;
    gt[d + j] += -gy;
    gth[j] += gx * (-a * sn[j] - b * cs[j]) + gy * (a * cs[j] - b * sn[j]);
  }
}

// --- SimplE -----------------------------------------------------------------

double score_simple(const ModelParams& p, const Ids& ids) {
  const auto hh = p.tensors[0].row(ids.h);
  const auto ht = p.tensors[1].row(ids.h);
  const auto th2 = p.tensors[0].row(ids.t);
  const auto tt = p.tensors[1].row(ids.t);
  const auto r = p.tensors[2].row(ids.r);
  const auto ri = p.tensors[3].row(ids.r);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    acc += hh[i] * r[i] * tt[i] + th2[i] * ri[i] * ht[i];
  return 0.5 * acc;
}

void grad_simple(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto hh = p.tensors[0].row(ids.h);
  const auto ht = p.tensors[1].row(ids.h);
  const auto th2 = p.tensors[0].row(ids.t);
  const auto tt = p.tensors[1].row(ids.t);
  const auto r = p.tensors[2].row(ids.r);
  const auto ri = p.tensors[3].row(ids.r);
  const std::size_t d = r.size();
  auto ghh = g.slot(0, ids.h, d);
  auto ght = g.slot(1, ids.h, d);
  auto gth = g.slot(0, ids.t, d);
  auto gtt = g.slot(1, ids.t, d);
  auto gr = g.slot(2, ids.r, d);
  auto gri = g.slot(3, ids.r, d);
  for (std::size_t i = 0; i < d; ++i) {
    ghh[i] += 0.5 * r[i] * tt[i];
    gtt[i] += 0.5 * hh[i] * r[i];
    gr[i] += 0.5 * hh[i] * tt[i];
    gth[i] += 0.5 * ri[i] * ht[i];
    ght[i] += 0.5 * th2[i] * ri[i];
    gri[i] += 0.5 * th2[i] * ht[i];
  }
}

// --- QuatE ------------------------------------------------------------------

double score_quate(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t q = h.size() / 4;
  double acc = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    const double hw = h[j], hx = h[q + j], hy = h[2 * q + j], hz = h[3 * q + j];
    double rw = r[j], rx = r[q + j], ry = r[2 * q + j], rz = r[3 * q + j];
    const double n = std::max(std::sqrt(rw * rw + rx * rx + ry * ry + rz * rz), 1e-12);
    rw /= n; rx /= n; ry /= n; rz /= n;
    const double w = hw * rw - hx * rx - hy * ry - hz * rz;
    const double x = hw * rx + hx * rw + hy * rz - hz * ry;
    const double y = hw * ry - hx * rz + hy * rw + hz * rx;
    const double z = hw * rz + hx * ry - hy * rx + hz * rw;
    acc += w * t[j] + x * t[q + j] + y * t[2 * q + j] + z * t[3 * q + j];
  }
  return acc;
}

void grad_quate(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  const std::size_t q = d / 4;
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t j = 0; j < q; ++j) {
    const double hw = h[j], hx = h[q + j], hy = h[2 * q + j], hz = h[3 * q + j];
    const double rw0 = r[j], rx0 = r[q + j], ry0 = r[2 * q + j], rz0 = r[3 * q + j];
    const double tw = t[j], tx = t[q + j], ty = t[2 * q + j], tz = t[3 * q + j];
    const double n = std::max(std::sqrt(rw0 * rw0 + rx0 * rx0 + ry0 * ry0 + rz0 * rz0), 1e-12);
    const double rw = rw0 / n, rx = rx0 / n, ry = ry0 / n, rz = rz0 / n;

    const double w = hw * rw - hx * rx - hy * ry - hz * rz;
    const double x = hw * rx + hx * rw + hy * rz - hz * ry;
    const double y = hw * ry - hx * rz + hy * rw + hz * rx;
    const double z = hw * rz + hx * ry - hy * rx + hz * rw;

    gt[j] += w;
    gt[q + j] += x;
    gt[2 * q + j] += y;
    gt[3 * q + j] += z;

    gh[j] += rw * tw + rx * tx + ry * ty + rz * tz;
    gh[q + j] += -rx * tw + rw * tx - rz * ty + ry * tz;
    gh[2 * q + j] += -ry * tw + rz * tx + rw * ty - rx * tz;
    gh[3 * q + j] += -rz * tw - ry * tx + rx * ty + rw * tz;

    // d f / d r-hat, then chain through the unit normalization.
    const double dw = hw * tw + hx * tx + hy * ty + hz * tz;
    const double dx = -hx * tw + hw * tx + hz * ty - hy * tz;
    const double dy = -hy * tw - hz * tx + hw * ty + hx * tz;
    const double dz = -hz * tw + hy * tx - hx * ty + hw * tz;
    const double proj = dw * rw + dx * rx + dy * ry + dz * rz;
    gr[j] += (dw - proj * rw) / n;
    gr[q + j] += (dx - proj * rx) / n;
    gr[2 * q + j] += (dy - proj * ry) / n;
    gr[3 * q + j] += (dz - proj * rz) / n;
  }
}

// --- SE ---------------------------------------------------------------------

double score_se(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto m1 = p.tensors[1].row(ids.r);
  const auto m2 = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double u = 0.0;
    const double* row1 = m1.data() + i * d;
    const double* row2 = m2.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) u += row1[j] * h[j] - row2[j] * t[j];
    acc += u * u;
  }
  return -std::sqrt(acc);
}

void grad_se(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto m1 = p.tensors[1].row(ids.r);
  const auto m2 = p.tensors[2].row(ids.r);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  std::vector<double> u(d);
  double nsq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double v = 0.0;
    const double* row1 = m1.data() + i * d;
    const double* row2 = m2.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) v += row1[j] * h[j] - row2[j] * t[j];
    u[i] = v;
    nsq += v * v;
  }
  const double n = std::sqrt(nsq);
  if (n == 0.0) return;
  auto gh = g.slot(0, ids.h, d);
  auto gt = g.slot(0, ids.t, d);
  auto gm1 = g.slot(1, ids.r, d * d);
  auto gm2 = g.slot(2, ids.r, d * d);
  for (std::size_t j = 0; j < d; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      s1 += m1[i * d + j] * u[i];
      s2 += m2[i * d + j] * u[i];
    }
    gh[j] += -s1 / n;
    gt[j] += s2 / n;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      gm1[i * d + j] += -(u[i] / n) * h[j];
      gm2[i * d + j] += (u[i] / n) * t[j];
    }
}

// --- MuRE -------------------------------------------------------------------

double score_mure(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto t = p.tensors[0].row(ids.t);
  const double bh = p.tensors[1].row(ids.h)[0];
  const double bt = p.tensors[1].row(ids.t)[0];
  const auto rho = p.tensors[2].row(ids.r);
  const auto rv = p.tensors[3].row(ids.r);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double u = rho[i] * h[i] - (t[i] + rv[i]);
    acc += u * u;
  }
  return -acc + bh + bt;
}

void grad_mure(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto t = p.tensors[0].row(ids.t);
  const auto rho = p.tensors[2].row(ids.r);
  const auto rv = p.tensors[3].row(ids.r);
  const std::size_t d = h.size();
  auto gh = g.slot(0, ids.h, d);
  auto gt = g.slot(0, ids.t, d);
  auto gbh = g.slot(1, ids.h, 1);
  auto gbt = g.slot(1, ids.t, 1);
  auto grho = g.slot(2, ids.r, d);
  auto grv = g.slot(3, ids.r, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double u = rho[i] * h[i] - (t[i] + rv[i]);
    gh[i] += -2.0 * u * rho[i];
    grho[i] += -2.0 * u * h[i];
    gt[i] += 2.0 * u;
    grv[i] += 2.0 * u;
  }
  gbh[0] += 1.0;
  gbt[0] += 1.0;
}

// --- BoxE -------------------------------------------------------------------

struct BoxDist {
  double value = 0.0;            // L2-aggregated distance
  std::vector<double> d_point;   // d(dist)/d(p_j)
  std::vector<double> d_center;  // d(dist)/d(c_j)
  std::vector<double> d_size;    // d(dist)/d(s_j)
};

BoxDist box_distance(const std::vector<double>& pt, Span center, Span size,
                     bool want_grad) {
  const std::size_t d = pt.size();
  std::vector<double> e(d), de_dp(d), de_ds(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double a = pt[j] - center[j];
    const double m = std::fabs(a);
    const double s = size[j];
    const double width = s + 1.0;
    const bool inside = m <= s / 2.0;
    if (inside) {
      e[j] = m / width;
      de_dp[j] = sign(a) / width;
      de_ds[j] = -m / (width * width);
    } else {
      e[j] = m * width - s * (s - 1.0) / width;
      de_dp[j] = sign(a) * width;
      de_ds[j] = m - (s * s + 2.0 * s - 1.0) / (width * width);
    }
  }
  BoxDist out;
  out.value = norm2(Span(e));
  if (!want_grad || out.value == 0.0) return out;
  out.d_point.assign(d, 0.0);
  out.d_center.assign(d, 0.0);
  out.d_size.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double w = e[j] / out.value;
    out.d_point[j] = w * de_dp[j];
    out.d_center[j] = -w * de_dp[j];
    out.d_size[j] = w * de_ds[j];
  }
  return out;
}

double score_boxe(const ModelParams& p, const Ids& ids) {
  const auto hb = p.tensors[0].row(ids.h);
  const auto hu = p.tensors[1].row(ids.h);
  const auto tb = p.tensors[0].row(ids.t);
  const auto tu = p.tensors[1].row(ids.t);
  const std::size_t d = hb.size();
  std::vector<double> p1(d), p2(d);
  for (std::size_t j = 0; j < d; ++j) {
    p1[j] = hb[j] + tu[j];
    p2[j] = tb[j] + hu[j];
  }
  const auto d1 = box_distance(p1, p.tensors[2].row(ids.r), p.tensors[3].row(ids.r), false);
  const auto d2 = box_distance(p2, p.tensors[4].row(ids.r), p.tensors[5].row(ids.r), false);
  return -(d1.value + d2.value);
}

void grad_boxe(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto hb = p.tensors[0].row(ids.h);
  const auto hu = p.tensors[1].row(ids.h);
  const auto tb = p.tensors[0].row(ids.t);
  const auto tu = p.tensors[1].row(ids.t);
  const std::size_t d = hb.size();
  std::vector<double> p1(d), p2(d);
  for (std::size_t j = 0; j < d; ++j) {
    p1[j] = hb[j] + tu[j];
    p2[j] = tb[j] + hu[j];
  }
  const auto d1 = box_distance(p1, p.tensors[2].row(ids.r), p.tensors[3].row(ids.r), true);
  const auto d2 = box_distance(p2, p.tensors[4].row(ids.r), p.tensors[5].row(ids.r), true);
  auto ghb = g.slot(0, ids.h, d);
  auto ghu = g.slot(1, ids.h, d);
  auto gtb = g.slot(0, ids.t, d);
  auto gtu = g.slot(1, ids.t, d);
  auto gc1 = g.slot(2, ids.r, d);
  auto gs1 = g.slot(3, ids.r, d);
  auto gc2 = g.slot(4, ids.r, d);
  auto gs2 = g.slot(5, ids.r, d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!d1.d_point.empty()) {
      ghb[j] += -d1.d_point[j];
      gtu[j] += -d1.d_point[j];
      gc1[j] += -d1.d_center[j];
      gs1[j] += -d1.d_size[j];
    }
    if (!d2.d_point.empty()) {
      gtb[j] += -d2.d_point[j];
      ghu[j] += -d2.d_point[j];
      gc2[j] += -d2.d_center[j];
      gs2[j] += -d2.d_size[j];
    }
  }
}

// --- CrossE -----------------------------------------------------------------

double score_crosse(const ModelParams& p, const Ids& ids) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto c = p.tensors[2].row(ids.r);
  const auto b = p.tensors[3].row(0);
  const auto t = p.tensors[0].row(ids.t);
  double z = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double q = c[i] * h[i] * (1.0 + r[i]) + b[i];
    z += std::tanh(q) * t[i];
  }
  return sigmoid(z);
}

void grad_crosse(const ModelParams& p, const Ids& ids, SparseGrad& g) {
  const auto h = p.tensors[0].row(ids.h);
  const auto r = p.tensors[1].row(ids.r);
  const auto c = p.tensors[2].row(ids.r);
  const auto b = p.tensors[3].row(0);
  const auto t = p.tensors[0].row(ids.t);
  const std::size_t d = h.size();
  std::vector<double> u(d);
  double z = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    u[i] = std::tanh(c[i] * h[i] * (1.0 + r[i]) + b[i]);
    z += u[i] * t[i];
  }
  const double sz = sigmoid(z);
  const double dz = sz * (1.0 - sz);
  auto gh = g.slot(0, ids.h, d);
  auto gr = g.slot(1, ids.r, d);
  auto gc = g.slot(2, ids.r, d);
  auto gb = g.slot(3, 0, d);
  auto gt = g.slot(0, ids.t, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double w = dz * t[i] * (1.0 - u[i] * u[i]);
    gt[i] += dz * u[i];
    gh[i] += w * c[i] * (1.0 + r[i]);
    gc[i] += w * h[i] * (1.0 + r[i]);
    gr[i] += w * c[i] * h[i];
    gb[i] += w;
  }
}

}  // namespace

double score(const ModelParams& params, std::size_t h, std::size_t r, std::size_t t) {
  const Ids ids{h, r, t};
  check_range(params, ids);
  switch (params.kind) {
    case ModelKind::transe: return score_transe(params, ids);
    case ModelKind::transh: return score_transh(params, ids);
    case ModelKind::transr: return score_transr(params, ids);
    case ModelKind::transd: return score_transd(params, ids);
    case ModelKind::transf: return score_transf(params, ids);
    case ModelKind::distmult: return score_distmult(params, ids);
    case ModelKind::complex_: return score_complex(params, ids);
    case ModelKind::hole: return score_hole(params, ids);
    case ModelKind::rotate: return score_rotate(params, ids);
    case ModelKind::simple: return score_simple(params, ids);
    case ModelKind::quate: return score_quate(params, ids);
    case ModelKind::se: return score_se(params, ids);
    case ModelKind::mure: return score_mure(params, ids);
    case ModelKind::boxe: return score_boxe(params, ids);
    case ModelKind::crosse: return score_crosse(params, ids);
  }
  throw invalid_error("unhandled model kind");
}

SparseGrad grad(const ModelParams& params, std::size_t h, std::size_t r, std::size_t t) {
  const Ids ids{h, r, t};
  check_range(params, ids);
  SparseGrad g;
  switch (params.kind) {
    case ModelKind::transe: grad_transe(params, ids, g); break;
    case ModelKind::transh: grad_transh(params, ids, g); break;
    case ModelKind::transr: grad_transr(params, ids, g); break;
    case ModelKind::transd: grad_transd(params, ids, g); break;
    case ModelKind::transf: grad_transf(params, ids, g); break;
    case ModelKind::distmult: grad_distmult(params, ids, g); break;
    case ModelKind::complex_: grad_complex(params, ids, g); break;
    case ModelKind::hole: grad_hole(params, ids, g); break;
    case ModelKind::rotate: grad_rotate(params, ids, g); break;
    case ModelKind::simple: grad_simple(params, ids, g); break;
    case ModelKind::quate: grad_quate(params, ids, g); break;
    case ModelKind::se: grad_se(params, ids, g); break;
    case ModelKind::mure: grad_mure(params, ids, g); break;
    case ModelKind::boxe: grad_boxe(params, ids, g); break;
    case ModelKind::crosse: grad_crosse(params, ids, g); break;
  }
  return g;
}

}  // namespace kgealign
