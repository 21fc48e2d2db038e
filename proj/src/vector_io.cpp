#include "annembed/vector_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace annembed {

namespace {

bool is_binary_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}

std::string loc(const std::string& path, int64_t lineno) {
  return path + ":" + std::to_string(lineno) + ": ";
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

using File = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void VectorSet::add(std::string token, const real* row) {
  if (vectors.cols == 0) throw DataError("vector set: dimension not set");
  if (index.count(token)) throw DataError("vector set: duplicate token: " + token);
  index[token] = static_cast<int32_t>(tokens.size());
  tokens.push_back(std::move(token));
  vectors.data.insert(vectors.data.end(), row, row + vectors.cols);
  ++vectors.rows;
}

void write_vectors(const VectorSet& set, const std::string& path) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot write vector file: " + path);
  const bool binary = is_binary_path(path);
  std::fprintf(f.get(), "%" PRId64 " %d\n", set.vectors.rows, set.vectors.cols);
  for (int64_t i = 0; i < set.vectors.rows; ++i) {
    const real* row = set.vectors.row(i);
    if (binary) {
      std::fputs(set.tokens[i].c_str(), f.get());
      std::fputc(' ', f.get());
      std::fwrite(row, sizeof(real), set.vectors.cols, f.get());
      std::fputc('\n', f.get());
    } else {
      std::fputs(set.tokens[i].c_str(), f.get());
      for (int j = 0; j < set.vectors.cols; ++j) std::fprintf(f.get(), " %.9g", double{row[j]});
      std::fputc('\n', f.get());
    }
  }
  if (std::ferror(f.get())) throw DataError("failed writing vector file: " + path);
}

namespace {

VectorSet read_text_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(loc(path, 1) + "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int64_t count = -1;
  int dim = -1;
  if (std::sscanf(line.c_str(), "%" SCNd64 " %d", &count, &dim) != 2 || count < 0 || dim < 1)
    throw DataError(loc(path, 1) + "expected header: row count and dimension");

  VectorSet set;
  set.vectors.cols = dim;
  set.tokens.reserve(count);
  set.vectors.data.reserve(static_cast<size_t>(count) * dim);
  std::vector<real> row(dim);
  for (int64_t i = 0; i < count; ++i) {
    const int64_t lineno = i + 2;
    if (!std::getline(in, line))
      throw DataError(loc(path, lineno) + "expected " + std::to_string(count) +
                      " rows, file ended after " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* p = line.c_str();
    const char* space = std::strchr(p, ' ');
    if (!space || space == p) throw DataError(loc(path, lineno) + "expected token and values");
    std::string token(p, space - p);
    const char* cursor = space;
    for (int j = 0; j < dim; ++j) {
      char* end = nullptr;
      row[j] = std::strtof(cursor, &end);
      if (end == cursor) throw DataError(loc(path, lineno) + "expected " + std::to_string(dim) +
                                         " values for token " + token);
      cursor = end;
    }
    while (*cursor == ' ') ++cursor;
    if (*cursor != '\0')
      throw DataError(loc(path, lineno) + "trailing content after " + std::to_string(dim) +
                      " values");
    if (set.index.count(token)) throw DataError(loc(path, lineno) + "duplicate token: " + token);
    set.add(std::move(token), row.data());
  }
  if (std::getline(in, line) && !line.empty())
    throw DataError(loc(path, count + 2) + "more rows than the header declares");
  return set;
}

VectorSet read_binary_vectors(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open vector file: " + path);
  std::string header;
  for (;;) {
    const int c = std::fgetc(f.get());
    if (c == EOF) throw DataError(loc(path, 1) + "missing header");
    if (c == '\n') break;
    header += static_cast<char>(c);
  }
  int64_t count = -1;
  int dim = -1;
  if (std::sscanf(header.c_str(), "%" SCNd64 " %d", &count, &dim) != 2 || count < 0 || dim < 1)
    throw DataError(loc(path, 1) + "expected header: row count and dimension");

  VectorSet set;
  set.vectors.cols = dim;
  std::vector<real> row(dim);
  for (int64_t i = 0; i < count; ++i) {
    std::string token;
    for (;;) {
      const int c = std::fgetc(f.get());
      if (c == EOF)
        throw DataError(path + ": row " + std::to_string(i) + ": unexpected end of file");
      if (c == ' ') break;
      if (c == '\n')
        throw DataError(path + ": row " + std::to_string(i) + ": token ended before values");
      token += static_cast<char>(c);
    }
    if (token.empty()) throw DataError(path + ": row " + std::to_string(i) + ": empty token");
    if (std::fread(row.data(), sizeof(real), dim, f.get()) != static_cast<size_t>(dim))
      throw DataError(path + ": row " + std::to_string(i) + ": truncated values");
    if (std::fgetc(f.get()) != '\n')
      throw DataError(path + ": row " + std::to_string(i) + ": missing row terminator");
    if (set.index.count(token))
      throw DataError(path + ": row " + std::to_string(i) + ": duplicate token: " + token);
    set.add(std::move(token), row.data());
  }
  if (std::fgetc(f.get()) != EOF)
    throw DataError(path + ": more rows than the header declares");
  return set;
}

}  // namespace

VectorSet read_vectors(const std::string& path) {
  return is_binary_path(path) ? read_binary_vectors(path) : read_text_vectors(path);
}

VectorSet word_vector_set(const EmbeddingModel& model, const Vocabulary& vocabulary) {
  if (model.words.rows != vocabulary.size())
    throw DataError("vector export: vocabulary does not match the model");
  VectorSet set;
  set.vectors.cols = model.dim;
  for (int32_t w = 0; w < vocabulary.size(); ++w)
    set.add(vocabulary.entry(w).surface, model.words.row(w));
  return set;
}

VectorSet annotation_vector_set(const EmbeddingModel& model,
                                const std::vector<std::string>& annotation_names) {
  if (model.annotations.rows != static_cast<int64_t>(annotation_names.size()))
    throw DataError("vector export: annotation names do not match the model");
  VectorSet set;
  set.vectors.cols = model.dim;
  for (size_t a = 0; a < annotation_names.size(); ++a)
    set.add(annotation_names[a], model.annotations.row(static_cast<int64_t>(a)));
  return set;
}

VectorSet doc_vector_set(const Matrix& doc_vectors) {
  VectorSet set;
  set.vectors.cols = doc_vectors.cols;
  for (int64_t d = 0; d < doc_vectors.rows; ++d)
    set.add("doc_" + std::to_string(d), doc_vectors.row(d));
  return set;
}

}  // namespace annembed
