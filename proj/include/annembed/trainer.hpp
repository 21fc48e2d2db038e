#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "annembed/corpus.hpp"
#include "annembed/model.hpp"
#include "annembed/random.hpp"

namespace annembed {

enum class TrainMode { Cbow, SkipGram, Aawp, Jwap, Dm, Dbow, Dis2Vec };

TrainMode parse_mode(const std::string& name);
const char* mode_name(TrainMode mode);
OutputLayer parse_layer(const std::string& name);
const char* layer_name(OutputLayer layer);

struct TrainConfig {
  TrainMode mode = TrainMode::Cbow;
  OutputLayer layer = OutputLayer::HierarchicalSoftmax;
  int dim = 100;
  int window = 5;       // per position the half window b is uniform in 1..window
  int epochs = 5;
  double lr0 = 0.025;
  double min_lr = 1e-4;
  int negatives = 5;    // negative-sampling draws per prediction
  double sample_t = 0;  // frequent-token downsampling threshold; 0 disables
  uint64_t seed = 1;
  int workers = 1;
  int dbow_samples = 1;          // targets sampled per position in dbow
  double pi_s = 0.5;             // in-domain pairs: P(negative drawn out of domain)
  double pi_o = 0.5;             // mixed pairs: P(dissimilarity update)
  double dis_alpha = 0.75;       // smoothing power of the domain-restricted pools
  double unigram_power = 0.75;   // smoothing power of the global table
  int64_t table_size = 10000000;
  bool verbose = false;
};

// Learning rate after `done` of `total` scheduled positions:
// max(min_lr, lr0 * (1 - done/total)).
double scheduled_lr(double lr0, double min_lr, int64_t done, int64_t total);

// Domain membership of a (target, context) word pair.
enum class PairCategory { InDomain, OutDomain, Mixed };
PairCategory classify_pair(bool target_in_domain, bool context_in_domain);

// One output-layer update, recorded when tracing: the predicted leaf, its
// label, the negatives drawn for it, and, for the companion pass where an
// annotation vector is the input, which annotation that was (-1 otherwise).
struct TraceUpdate {
  int32_t leaf = -1;
  double label = 1.0;
  int32_t input_annotation = -1;
  std::vector<int32_t> negatives;
};

// Per-worker generator and scratch. Tracing accumulates, per processed
// position, the total loss, the loss gradient with respect to the position's
// main input vector, and every output-layer update made.
struct WorkerState {
  explicit WorkerState(uint64_t seed) : rng(seed) {}

  Rng rng;
  std::vector<real> h;
  std::vector<double> grad;
  std::vector<double> grad2;
  std::vector<int32_t> context;
  std::vector<int32_t> negatives;

  bool trace = false;
  double trace_loss = 0;
  std::vector<double> trace_grad;
  std::vector<TraceUpdate> trace_updates;

  void reset_trace(int dim) {
    trace_loss = 0;
    trace_grad.assign(dim, 0.0);
    trace_updates.clear();
  }
};

// Streams (document, position) pairs through the selected architecture.
// Construction initializes the model (and the softmax tree or sampling
// tables); train() runs the epochs. With several workers, updates are applied
// lock-free and concurrent writes may collide; a single worker is
// deterministic for a fixed seed.
class Trainer {
 public:
  Trainer(const EncodedCorpus& corpus, const TrainConfig& config,
          std::vector<uint8_t> domain_mask = {});

  void train();

  EmbeddingModel& model() { return model_; }
  const EmbeddingModel& model() const { return model_; }
  Matrix& doc_vectors() { return docs_; }
  const Matrix& doc_vectors() const { return docs_; }
  const NegativeTable& negative_table() const { return table_; }
  const TrainConfig& config() const { return cfg_; }

  WorkerState make_worker(int index) const;
  // One position with an explicit half window b in 1..window.
  void train_position(size_t doc, size_t pos, int b, double lr, WorkerState& w);

 private:
  void worker_loop(int index, int stride);
  double predict(const real* h, int32_t leaf, double lr, std::vector<double>& grad,
                 WorkerState& w, int32_t input_annotation = -1);
  void cbow_like(const std::vector<int32_t>& doc, size_t pos, int b, double lr, WorkerState& w,
                 bool use_annotations);
  void sg_like(const std::vector<int32_t>& doc, size_t pos, int b, double lr, WorkerState& w,
               bool use_annotations);
  void dm_step(size_t doc, size_t pos, int b, double lr, WorkerState& w);
  void dbow_step(size_t doc, double lr, WorkerState& w);
  void dis2vec_step(const std::vector<int32_t>& doc, size_t pos, int b, double lr, WorkerState& w);
  bool in_domain(int32_t word) const {
    return !domain_mask_.empty() && domain_mask_[word] != 0;
  }
  const NegativeTable& domain_pool(bool out_of_domain);

  const EncodedCorpus& corpus_;
  TrainConfig cfg_;
  std::vector<uint8_t> domain_mask_;
  EmbeddingModel model_;
  Matrix docs_;
  NegativeTable table_;      // global, over the full leaf space
  NegativeTable in_table_;   // domain-restricted pools (pair classification)
  NegativeTable out_table_;
  std::vector<double> keep_;  // per-word downsampling keep probability
  std::atomic<int64_t> progress_{0};
  std::atomic<bool> warned_in_pool_{false};
  std::atomic<bool> warned_out_pool_{false};
  int64_t schedule_total_ = 0;
};

}  // namespace annembed
