#pragma once

// Minimal reader for the pickle streams used by the public citation datasets:
// numpy arrays, scipy CSR matrices and collections.defaultdict(list). It builds
// a generic object tree; nothing is ever imported or executed.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace imverde::pickle {

struct Value;
using ValuePtr = std::shared_ptr<Value>;

struct Str {
  std::string utf8;
};
struct Bytes {
  std::string data;
};
struct Tuple {
  std::vector<ValuePtr> items;
};
struct List {
  std::vector<ValuePtr> items;
};
struct Dict {
  std::vector<std::pair<ValuePtr, ValuePtr>> items;
};
struct Global {
  std::string module;
  std::string name;
};
/// Result of REDUCE / NEWOBJ, plus whatever BUILD, APPEND(S) and SETITEM(S) added.
struct Object {
  ValuePtr callable;
  ValuePtr args;
  ValuePtr state;
  std::vector<ValuePtr> list_items;
  std::vector<std::pair<ValuePtr, ValuePtr>> dict_items;
};

struct Value {
  std::variant<std::monostate, bool, std::int64_t, double, Str, Bytes, Tuple, List, Dict, Global,
               Object>
      v;
};

/// Parses one pickle stream; throws imverde::ParseError on malformed input or
/// unsupported opcodes.
ValuePtr load(std::string_view data, const std::string& source = "<pickle>");

/// Fully qualified name ("module.name") when `value` is an Object built from a Global.
std::string class_name(const Value& value);

struct NdArray {
  std::vector<std::size_t> shape;
  char kind = 'f';  // 'f', 'i', 'u' or 'b'
  std::size_t itemsize = 8;
  bool fortran_order = false;
  std::string data;

  std::size_t size() const;
  /// Element `i` in storage order, converted to double.
  double at(std::size_t i) const;
  /// Element (row, col) of a 2-D array.
  double at(std::size_t row, std::size_t col) const;
};

struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> indptr;
  std::vector<std::int64_t> indices;
  std::vector<double> values;
};

NdArray as_ndarray(const Value& value);
CsrMatrix as_csr(const Value& value);
/// dict or defaultdict with integer keys and list-of-int values.
std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> as_int_adjacency(const Value& value);

}  // namespace imverde::pickle
