#include "star/geo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "star/training.hpp"  // sample_negatives

namespace star {

GeoKind parse_geo_kind(const std::string& s) {
  if (s == "transe") return GeoKind::TransE;
  if (s == "rotate") return GeoKind::RotatE;
  throw std::invalid_argument("unknown geometric model: " + s);
}

std::string to_string(GeoKind k) {
  return k == GeoKind::TransE ? "transe" : "rotate";
}

namespace {
using Vec = Eigen::VectorXd;
using Cx = std::complex<double>;

double transe_dist(const GeoEmbeddings& g, const Triple& t) {
  Vec d = g.entities.col(t.head) + g.relations.col(t.rel) - g.entities.col(t.tail);
  return g.p_norm == 1 ? d.lpNorm<1>() : d.norm();
}

double rotate_dist(const GeoEmbeddings& g, const Triple& t) {
  const Eigen::Index half = g.relations.rows();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < half; ++k) {
    Cx h(g.entities(2 * k, t.head), g.entities(2 * k + 1, t.head));
    Cx tl(g.entities(2 * k, t.tail), g.entities(2 * k + 1, t.tail));
    Cx r = std::polar(1.0, g.relations(k, t.rel));
    acc += std::norm(h * r - tl);
  }
  return std::sqrt(acc);
}
}  // namespace

double transe_score(const GeoEmbeddings& g, const Triple& t) {
  return -transe_dist(g, t);
}

double rotate_score(const GeoEmbeddings& g, const Triple& t) {
  return -rotate_dist(g, t);
}

double geo_score(const GeoEmbeddings& g, const Triple& t) {
  return g.kind == GeoKind::TransE ? transe_score(g, t) : rotate_score(g, t);
}

GeoEmbeddings geo_init(const KnowledgeGraph& kg, const GeoConfig& cfg) {
  if (cfg.kind == GeoKind::RotatE && cfg.d_g % 2 != 0)
    throw std::invalid_argument("RotatE needs an even dimension");
  GeoEmbeddings g;
  g.kind = cfg.kind;
  g.p_norm = cfg.p_norm;
  std::mt19937_64 rng(cfg.seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.d_g));
  std::uniform_real_distribution<double> uni(-bound, bound);
  g.entities.resize(cfg.d_g, kg.num_entities());
  for (Eigen::Index j = 0; j < g.entities.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.entities.rows(); ++i)
      g.entities(i, j) = uni(rng);
    double n = g.entities.col(j).norm();
    if (n > 1.0) g.entities.col(j) /= n;
  }
  if (cfg.kind == GeoKind::TransE) {
    g.relations.resize(cfg.d_g, kg.num_relations());
    for (Eigen::Index j = 0; j < g.relations.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.relations.rows(); ++i)
        g.relations(i, j) = uni(rng);
      double n = g.relations.col(j).norm();
      if (n > 1e-12) g.relations.col(j) /= n;
    }
  } else {
    std::uniform_real_distribution<double> phase(-M_PI, M_PI);
    g.relations.resize(cfg.d_g / 2, kg.num_relations());
    for (Eigen::Index j = 0; j < g.relations.cols(); ++j)
      for (Eigen::Index i = 0; i < g.relations.rows(); ++i)
        g.relations(i, j) = phase(rng);
  }
  return g;
}

namespace {

// Subgradient of the distance w.r.t. delta = h + r - t (TransE).
Vec transe_delta_grad(const Vec& delta, int p) {
  if (p == 1) return delta.unaryExpr([](double x) { return x == 0.0 ? 0.0 : (x > 0 ? 1.0 : -1.0); });
  double n = delta.norm();
  if (n < 1e-12) return Vec::Zero(delta.size());
  return delta / n;
}

struct RotGrad {
  Vec h, t;       // real-coordinate gradients of the distance
  Vec phase;      // per complex component
};

RotGrad rotate_grads(const GeoEmbeddings& g, const Triple& tr) {
  const Eigen::Index half = g.relations.rows();
  RotGrad out{Vec::Zero(2 * half), Vec::Zero(2 * half), Vec::Zero(half)};
  double dist = rotate_dist(g, tr);
  if (dist < 1e-12) return out;
  for (Eigen::Index k = 0; k < half; ++k) {
    Cx h(g.entities(2 * k, tr.head), g.entities(2 * k + 1, tr.head));
    Cx tl(g.entities(2 * k, tr.tail), g.entities(2 * k + 1, tr.tail));
    Cx r = std::polar(1.0, g.relations(k, tr.rel));
    Cx hr = h * r;
    Cx diff = hr - tl;
    Cx gd = diff / dist;              // gradient w.r.t. diff
    Cx gh = gd * std::conj(r);
    out.h(2 * k) = gh.real();
    out.h(2 * k + 1) = gh.imag();
    out.t(2 * k) = -gd.real();
    out.t(2 * k + 1) = -gd.imag();
    out.phase(k) = (std::conj(gd) * Cx(0, 1) * hr).real();
  }
  return out;
}

void renorm_entity(GeoEmbeddings& g, EntityId e) {
  double n = g.entities.col(e).norm();
  if (n > 1.0) g.entities.col(e) /= n;
}

}  // namespace

GeoEmbeddings train_geo(const KnowledgeGraph& kg, const GeoConfig& cfg,
                        GeoEpochCallback on_epoch) {
  GeoEmbeddings g = geo_init(kg, cfg);
  if (kg.train.empty()) return g;
  std::mt19937_64 rng(cfg.seed + 1);
  const double lr = cfg.learning_rate;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<size_t> order(kg.train.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    long n_terms = 0;
    for (size_t idx : order) {
      const Triple& pos = kg.train[idx];
      for (const Triple& neg : sample_negatives(kg, pos, cfg.n_negatives, rng)) {
        double dp, dn;
        if (g.kind == GeoKind::TransE) {
          dp = transe_dist(g, pos);
          dn = transe_dist(g, neg);
        } else {
          dp = rotate_dist(g, pos);
          dn = rotate_dist(g, neg);
        }
        double viol = cfg.margin + dp - dn;
        ++n_terms;
        if (viol <= 0.0) continue;
        epoch_loss += viol;
        if (lr == 0.0) continue;

        if (g.kind == GeoKind::TransE) {
          Vec gp = transe_delta_grad(
              g.entities.col(pos.head) + g.relations.col(pos.rel) -
                  g.entities.col(pos.tail),
              g.p_norm);
          Vec gn = transe_delta_grad(
              g.entities.col(neg.head) + g.relations.col(neg.rel) -
                  g.entities.col(neg.tail),
              g.p_norm);
          g.entities.col(pos.head) -= lr * gp;
          g.entities.col(pos.tail) += lr * gp;
          g.relations.col(pos.rel) -= lr * (gp - gn);
          g.entities.col(neg.head) += lr * gn;
          g.entities.col(neg.tail) -= lr * gn;
          renorm_entity(g, pos.head);
          renorm_entity(g, pos.tail);
          renorm_entity(g, neg.head);
          renorm_entity(g, neg.tail);
        } else {
          RotGrad gp = rotate_grads(g, pos);
          RotGrad gn = rotate_grads(g, neg);
          g.entities.col(pos.head) -= lr * gp.h;
          g.entities.col(pos.tail) -= lr * gp.t;
          g.relations.col(pos.rel) -= lr * (gp.phase - gn.phase);
          g.entities.col(neg.head) += lr * gn.h;
          g.entities.col(neg.tail) += lr * gn.t;
        }
        ++g.version;
      }
    }
    if (on_epoch)
      on_epoch({epoch, n_terms ? epoch_loss / static_cast<double>(n_terms) : 0.0});
  }
  return g;
}

InductiveReport inductive_complete(GeoEmbeddings& g,
                                   const std::vector<Triple>& support,
                                   const std::vector<EntityId>& unseen) {
  const Eigen::Index half = g.kind == GeoKind::RotatE ? g.relations.rows() : 0;
  InductiveReport rep;
  for (EntityId e : unseen) {
    Vec acc = Vec::Zero(g.entities.rows());
    int n = 0;
    for (const Triple& s : support) {
      if (s.head == e && s.tail == e) continue;  // ambiguous self-loop
      if (s.head == e) {
        // invert the relation applied to the tail
        if (g.kind == GeoKind::TransE) {
          acc += g.entities.col(s.tail) - g.relations.col(s.rel);
        } else {
          for (Eigen::Index k = 0; k < half; ++k) {
            Cx tl(g.entities(2 * k, s.tail), g.entities(2 * k + 1, s.tail));
            Cx est = tl * std::polar(1.0, -g.relations(k, s.rel));
            acc(2 * k) += est.real();
            acc(2 * k + 1) += est.imag();
          }
        }
        ++n;
      } else if (s.tail == e) {
        if (g.kind == GeoKind::TransE) {
          acc += g.entities.col(s.head) + g.relations.col(s.rel);
        } else {
          for (Eigen::Index k = 0; k < half; ++k) {
            Cx h(g.entities(2 * k, s.head), g.entities(2 * k + 1, s.head));
            Cx est = h * std::polar(1.0, g.relations(k, s.rel));
            acc(2 * k) += est.real();
            acc(2 * k + 1) += est.imag();
          }
        }
        ++n;
      }
    }
    if (n > 0) {
      g.entities.col(e) = acc / static_cast<double>(n);
      ++rep.placed;
    } else {
      g.entities.col(e).setZero();
      ++rep.unsupported;
    }
  }
  ++g.version;
  return rep;
}

}  // namespace star
