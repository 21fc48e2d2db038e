#include "annembed/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

namespace annembed {

TrainMode parse_mode(const std::string& name) {
  if (name == "cbow") return TrainMode::Cbow;
  if (name == "sg") return TrainMode::SkipGram;
  if (name == "aawp") return TrainMode::Aawp;
  if (name == "jwap") return TrainMode::Jwap;
  if (name == "dm") return TrainMode::Dm;
  if (name == "dbow") return TrainMode::Dbow;
  if (name == "dis2vec") return TrainMode::Dis2Vec;
  throw DataError("unknown mode: " + name);
}

const char* mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Cbow: return "cbow";
    case TrainMode::SkipGram: return "sg";
    case TrainMode::Aawp: return "aawp";
    case TrainMode::Jwap: return "jwap";
    case TrainMode::Dm: return "dm";
    case TrainMode::Dbow: return "dbow";
    case TrainMode::Dis2Vec: return "dis2vec";
  }
  return "?";
}

OutputLayer parse_layer(const std::string& name) {
  if (name == "hs") return OutputLayer::HierarchicalSoftmax;
  if (name == "ns") return OutputLayer::NegativeSampling;
  throw DataError("unknown output layer: " + name);
}

const char* layer_name(OutputLayer layer) {
  return layer == OutputLayer::HierarchicalSoftmax ? "hs" : "ns";
}

double scheduled_lr(double lr0, double min_lr, int64_t done, int64_t total) {
  const double lr = lr0 * (1.0 - static_cast<double>(done) / static_cast<double>(total));
  return lr > min_lr ? lr : min_lr;
}

PairCategory classify_pair(bool target_in_domain, bool context_in_domain) {
  if (target_in_domain && context_in_domain) return PairCategory::InDomain;
  if (!target_in_domain && !context_in_domain) return PairCategory::OutDomain;
  return PairCategory::Mixed;
}

namespace {

constexpr uint64_t kWorkerSeedStride = 0x9E3779B97F4A7C15ULL;

void gather_context(const std::vector<int32_t>& doc, size_t pos, int b,
                    std::vector<int32_t>& out) {
  out.clear();
  const int64_t n = static_cast<int64_t>(doc.size());
  const int64_t p = static_cast<int64_t>(pos);
  for (int64_t j = p - b; j <= p + b; ++j) {
    if (j < 0 || j >= n || j == p) continue;
    out.push_back(doc[j]);
  }
}

}  // namespace

Trainer::Trainer(const EncodedCorpus& corpus, const TrainConfig& config,
                 std::vector<uint8_t> domain_mask)
    : corpus_(corpus), cfg_(config), domain_mask_(std::move(domain_mask)) {
  if (cfg_.dim < 1) throw DataError("train: dim must be >= 1");
  if (cfg_.window < 1) throw DataError("train: window must be >= 1");
  if (cfg_.epochs < 1) throw DataError("train: epochs must be >= 1");
  if (cfg_.workers < 1) throw DataError("train: workers must be >= 1");
  if (!(cfg_.lr0 > cfg_.min_lr) || cfg_.min_lr < 0)
    throw DataError("train: need lr0 > min_lr >= 0");
  if (corpus_.vocabulary.size() < 1 || corpus_.total_positions() == 0)
    throw DataError("train: empty corpus");
  if (cfg_.layer == OutputLayer::NegativeSampling && cfg_.negatives < 1)
    throw DataError("train: negatives must be >= 1");
  if (cfg_.mode == TrainMode::Dis2Vec && cfg_.layer != OutputLayer::NegativeSampling)
    throw DataError("train: dis2vec requires the negative-sampling output layer");
  if (cfg_.mode == TrainMode::Dbow && cfg_.dbow_samples < 1)
    throw DataError("train: dbow_samples must be >= 1");
  if (!domain_mask_.empty() &&
      domain_mask_.size() != static_cast<size_t>(corpus_.vocabulary.size()))
    throw DataError("train: domain mask size does not match the vocabulary");

  const bool use_annotations = cfg_.mode == TrainMode::Aawp || cfg_.mode == TrainMode::Jwap;
  if (use_annotations && !corpus_.has_annotations())
    std::fprintf(stderr, "warning: mode %s with an empty annotation map; training runs as %s\n",
                 mode_name(cfg_.mode), cfg_.mode == TrainMode::Aawp ? "cbow" : "sg");

  const int64_t word_count = corpus_.vocabulary.size();
  const int64_t annotation_count =
      use_annotations ? static_cast<int64_t>(corpus_.annotation_names.size()) : 0;
  model_ = init_matrices(word_count, annotation_count, cfg_.dim, cfg_.seed, cfg_.layer);

  std::vector<int64_t> leaf_freq;
  leaf_freq.reserve(word_count + annotation_count);
  for (int32_t w = 0; w < word_count; ++w) leaf_freq.push_back(corpus_.vocabulary.entry(w).count);
  for (int64_t a = 0; a < annotation_count; ++a)
    leaf_freq.push_back(corpus_.annotation_frequencies[a]);

  if (cfg_.layer == OutputLayer::HierarchicalSoftmax) {
    attach_huffman(model_, leaf_freq);
  } else {
    table_ = NegativeTable(leaf_freq, cfg_.unigram_power, cfg_.table_size);
  }

  if (cfg_.mode == TrainMode::Dis2Vec) {
    std::vector<int32_t> in_ids, out_ids;
    std::vector<int64_t> in_counts, out_counts;
    for (int32_t w = 0; w < word_count; ++w) {
      if (in_domain(w)) {
        in_ids.push_back(w);
        in_counts.push_back(corpus_.vocabulary.entry(w).count);
      } else {
        out_ids.push_back(w);
        out_counts.push_back(corpus_.vocabulary.entry(w).count);
      }
    }
    in_table_ = NegativeTable(in_ids, in_counts, cfg_.dis_alpha, cfg_.table_size);
    out_table_ = NegativeTable(out_ids, out_counts, cfg_.dis_alpha, cfg_.table_size);
  }

  if (cfg_.mode == TrainMode::Dm || cfg_.mode == TrainMode::Dbow) {
    docs_ = Matrix(static_cast<int64_t>(corpus_.documents.size()), cfg_.dim);
    Rng rng(cfg_.seed ^ 0xD0C5EED5ULL);
    for (real& v : docs_.data) v = static_cast<real>((rng.real01() - 0.5) / cfg_.dim);
  }

  if (cfg_.sample_t > 0) {
    keep_.resize(word_count);
    for (int32_t w = 0; w < word_count; ++w)
      keep_[w] = subsample_keep_probability(corpus_.vocabulary.entry(w).count,
                                            corpus_.vocabulary.retained_tokens(), cfg_.sample_t);
  }

  schedule_total_ = static_cast<int64_t>(cfg_.epochs) * corpus_.total_positions();
}

WorkerState Trainer::make_worker(int index) const {
  WorkerState w(cfg_.seed + kWorkerSeedStride * static_cast<uint64_t>(index + 1));
  w.h.resize(cfg_.dim);
  w.grad.resize(cfg_.dim);
  w.grad2.resize(cfg_.dim);
  return w;
}

void Trainer::train() {
  progress_.store(0);
  if (cfg_.workers == 1) {
    worker_loop(0, 1);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(cfg_.workers);
  for (int i = 0; i < cfg_.workers; ++i)
    threads.emplace_back(&Trainer::worker_loop, this, i, cfg_.workers);
  for (auto& t : threads) t.join();
}

void Trainer::worker_loop(int index, int stride) {
  WorkerState w = make_worker(index);
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (size_t d = static_cast<size_t>(index); d < corpus_.documents.size();
         d += static_cast<size_t>(stride)) {
      const auto& doc = corpus_.documents[d];
      for (size_t p = 0; p < doc.size(); ++p) {
        const int64_t done = progress_.fetch_add(1, std::memory_order_relaxed);
        const double lr = scheduled_lr(cfg_.lr0, cfg_.min_lr, done, schedule_total_);
        if (!keep_.empty() && w.rng.real01() > keep_[doc[p]]) continue;
        const int b = 1 + static_cast<int>(w.rng.below(cfg_.window));
        train_position(d, p, b, lr, w);
      }
    }
    if (cfg_.verbose && index == 0)
      std::fprintf(stderr, "epoch %d/%d done (lr %.6f)\n", epoch + 1, cfg_.epochs,
                   scheduled_lr(cfg_.lr0, cfg_.min_lr, progress_.load(), schedule_total_));
  }
}

void Trainer::train_position(size_t doc, size_t pos, int b, double lr, WorkerState& w) {
  const auto& d = corpus_.documents[doc];
  switch (cfg_.mode) {
    case TrainMode::Cbow: cbow_like(d, pos, b, lr, w, false); break;
    case TrainMode::Aawp: cbow_like(d, pos, b, lr, w, true); break;
    case TrainMode::SkipGram: sg_like(d, pos, b, lr, w, false); break;
    case TrainMode::Jwap: sg_like(d, pos, b, lr, w, true); break;
    case TrainMode::Dm: dm_step(doc, pos, b, lr, w); break;
    case TrainMode::Dbow: dbow_step(doc, lr, w); break;
    case TrainMode::Dis2Vec: dis2vec_step(d, pos, b, lr, w); break;
  }
}

double Trainer::predict(const real* h, int32_t leaf, double lr, std::vector<double>& grad,
                        WorkerState& w, int32_t input_annotation) {
  if (model_.layer == OutputLayer::HierarchicalSoftmax) {
    if (w.trace) w.trace_updates.push_back(TraceUpdate{leaf, 1.0, input_annotation, {}});
    return hs_update(model_, h, leaf, lr, grad.data());
  }
  w.negatives.clear();
  for (int i = 0; i < cfg_.negatives; ++i) {
    const int32_t s = table_.sample_excluding(w.rng, leaf);
    if (s >= 0) w.negatives.push_back(s);
  }
  if (w.trace) w.trace_updates.push_back(TraceUpdate{leaf, 1.0, input_annotation, w.negatives});
  return ns_update(model_, h, leaf, w.negatives, lr, grad.data());
}

void Trainer::cbow_like(const std::vector<int32_t>& doc, size_t pos, int b, double lr,
                        WorkerState& w, bool use_annotations) {
  gather_context(doc, pos, b, w.context);
  const int32_t target = doc[pos];
  const std::vector<int32_t>* annos =
      use_annotations ? &corpus_.word_annotations[target] : nullptr;
  const size_t n = w.context.size() + (annos ? annos->size() : 0);
  if (n == 0) return;

  // input is the average of the context word vectors and, jointly, the
  // target's annotation vectors
  std::fill(w.h.begin(), w.h.end(), 0.0f);
  for (int32_t c : w.context) {
    const real* r = model_.words.row(c);
    for (int j = 0; j < cfg_.dim; ++j) w.h[j] += r[j];
  }
  if (annos)
    for (int32_t a : *annos) {
      const real* r = model_.annotations.row(a);
      for (int j = 0; j < cfg_.dim; ++j) w.h[j] += r[j];
    }
  const real inv = 1.0f / static_cast<real>(n);
  for (int j = 0; j < cfg_.dim; ++j) w.h[j] *= inv;

  std::fill(w.grad.begin(), w.grad.end(), 0.0);
  const double loss = predict(w.h.data(), model_.word_leaf(target), lr, w.grad, w);
  if (w.trace) {
    w.trace_loss += loss;
    for (int j = 0; j < cfg_.dim; ++j) w.trace_grad[j] += w.grad[j];
  }

  // the input gradient is split equally over the contributors
  const double scale = lr / static_cast<double>(n);
  for (int32_t c : w.context) {
    real* r = model_.words.row(c);
    for (int j = 0; j < cfg_.dim; ++j) r[j] -= static_cast<real>(scale * w.grad[j]);
  }
  if (annos)
    for (int32_t a : *annos) {
      real* r = model_.annotations.row(a);
      for (int j = 0; j < cfg_.dim; ++j) r[j] -= static_cast<real>(scale * w.grad[j]);
    }
}

void Trainer::sg_like(const std::vector<int32_t>& doc, size_t pos, int b, double lr,
                      WorkerState& w, bool use_annotations) {
  const int32_t target = doc[pos];
  real* h = model_.words.row(target);
  const int64_t n = static_cast<int64_t>(doc.size());
  const int64_t p = static_cast<int64_t>(pos);
  for (int64_t j = p - b; j <= p + b; ++j) {
    if (j < 0 || j >= n || j == p) continue;
    const int32_t c = doc[j];
    const std::vector<int32_t>* annos = use_annotations ? &corpus_.word_annotations[c] : nullptr;

    // the target vector predicts the context word and that word's annotations
    std::fill(w.grad.begin(), w.grad.end(), 0.0);
    double loss = predict(h, model_.word_leaf(c), lr, w.grad, w);
    if (annos)
      for (int32_t a : *annos) loss += predict(h, model_.annotation_leaf(a), lr, w.grad, w);
    if (w.trace) {
      w.trace_loss += loss;
      for (int k = 0; k < cfg_.dim; ++k) w.trace_grad[k] += w.grad[k];
    }
    for (int k = 0; k < cfg_.dim; ++k) h[k] -= static_cast<real>(lr * w.grad[k]);

    // companion pass: each annotation vector predicts the observed word, so
    // annotation rows keep training under the shared output parameters
    if (annos)
      for (int32_t a : *annos) {
        real* ha = model_.annotations.row(a);
        std::fill(w.grad2.begin(), w.grad2.end(), 0.0);
        const double companion_loss = predict(ha, model_.word_leaf(c), lr, w.grad2, w, a);
        if (w.trace) w.trace_loss += companion_loss;
        for (int k = 0; k < cfg_.dim; ++k) ha[k] -= static_cast<real>(lr * w.grad2[k]);
      }
  }
}

void Trainer::dm_step(size_t doc, size_t pos, int b, double lr, WorkerState& w) {
  const auto& d = corpus_.documents[doc];
  gather_context(d, pos, b, w.context);
  const int32_t target = d[pos];
  const size_t n = w.context.size() + 1;  // the doc vector always contributes

  std::fill(w.h.begin(), w.h.end(), 0.0f);
  for (int32_t c : w.context) {
    const real* r = model_.words.row(c);
    for (int j = 0; j < cfg_.dim; ++j) w.h[j] += r[j];
  }
  real* dv = docs_.row(static_cast<int64_t>(doc));
  for (int j = 0; j < cfg_.dim; ++j) w.h[j] += dv[j];
  const real inv = 1.0f / static_cast<real>(n);
  for (int j = 0; j < cfg_.dim; ++j) w.h[j] *= inv;

  std::fill(w.grad.begin(), w.grad.end(), 0.0);
  const double loss = predict(w.h.data(), model_.word_leaf(target), lr, w.grad, w);
  if (w.trace) {
    w.trace_loss += loss;
    for (int j = 0; j < cfg_.dim; ++j) w.trace_grad[j] += w.grad[j];
  }

  const double scale = lr / static_cast<double>(n);
  for (int32_t c : w.context) {
    real* r = model_.words.row(c);
    for (int j = 0; j < cfg_.dim; ++j) r[j] -= static_cast<real>(scale * w.grad[j]);
  }
  for (int j = 0; j < cfg_.dim; ++j) dv[j] -= static_cast<real>(scale * w.grad[j]);
}

void Trainer::dbow_step(size_t doc, double lr, WorkerState& w) {
  const auto& d = corpus_.documents[doc];
  real* dv = docs_.row(static_cast<int64_t>(doc));
  for (int s = 0; s < cfg_.dbow_samples; ++s) {
    const int32_t target = d[w.rng.below(d.size())];
    std::fill(w.grad.begin(), w.grad.end(), 0.0);
    const double loss = predict(dv, model_.word_leaf(target), lr, w.grad, w);
    if (w.trace) {
      w.trace_loss += loss;
      for (int j = 0; j < cfg_.dim; ++j) w.trace_grad[j] += w.grad[j];
    }
    for (int j = 0; j < cfg_.dim; ++j) dv[j] -= static_cast<real>(lr * w.grad[j]);
  }
}

const NegativeTable& Trainer::domain_pool(bool out_of_domain) {
  const NegativeTable& requested = out_of_domain ? out_table_ : in_table_;
  if (!requested.empty()) return requested;
  auto& warned = out_of_domain ? warned_out_pool_ : warned_in_pool_;
  if (!warned.exchange(true))
    std::fprintf(stderr, "warning: empty %s-domain context pool; falling back to the global table\n",
                 out_of_domain ? "out-of" : "in");
  return table_;
}

void Trainer::dis2vec_step(const std::vector<int32_t>& doc, size_t pos, int b, double lr,
                           WorkerState& w) {
  const int32_t target = doc[pos];
  real* h = model_.words.row(target);
  const bool target_in = in_domain(target);
  const int64_t n = static_cast<int64_t>(doc.size());
  const int64_t p = static_cast<int64_t>(pos);
  for (int64_t j = p - b; j <= p + b; ++j) {
    if (j < 0 || j >= n || j == p) continue;
    const int32_t c = doc[j];
    std::fill(w.grad.begin(), w.grad.end(), 0.0);
    double loss = 0;
    switch (classify_pair(target_in, in_domain(c))) {
      case PairCategory::OutDomain:
        // plain negative sampling from the global table
        loss = predict(h, model_.word_leaf(c), lr, w.grad, w);
        break;
      case PairCategory::InDomain: {
        loss = binary_update(model_, h, c, 1.0, lr, w.grad.data());
        w.negatives.clear();
        for (int i = 0; i < cfg_.negatives; ++i) {
          const bool out_pool = w.rng.real01() < cfg_.pi_s;
          const int32_t s = domain_pool(out_pool).sample_excluding(w.rng, c);
          if (s < 0) continue;
          w.negatives.push_back(s);
          loss += binary_update(model_, h, s, 0.0, lr, w.grad.data());
        }
        if (w.trace) w.trace_updates.push_back(TraceUpdate{c, 1.0, -1, w.negatives});
        break;
      }
      case PairCategory::Mixed: {
        // dissimilarity with probability pi_o, similarity otherwise; no negatives
        const double label = w.rng.real01() < cfg_.pi_o ? 0.0 : 1.0;
        loss = binary_update(model_, h, c, label, lr, w.grad.data());
        if (w.trace) w.trace_updates.push_back(TraceUpdate{c, label, -1, {}});
        break;
      }
    }
    if (w.trace) {
      w.trace_loss += loss;
      for (int k = 0; k < cfg_.dim; ++k) w.trace_grad[k] += w.grad[k];
    }
    for (int k = 0; k < cfg_.dim; ++k) h[k] -= static_cast<real>(lr * w.grad[k]);
  }
}

}  // namespace annembed
