#include "imverde/detail/pickle.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <unordered_map>

#include "imverde/error.hpp"

namespace imverde::pickle {
namespace {

ValuePtr make(auto&& v) {
  auto p = std::make_shared<Value>();
  p->v = std::forward<decltype(v)>(v);
  return p;
}

class Reader {
 public:
  Reader(std::string_view data, const std::string& source) : data_(data), source_(source) {}

  ValuePtr run() {
    while (true) {
      const std::uint8_t op = u8();
      switch (op) {
        case 0x80: u8(); break;           // PROTO
        case 0x95: bytes(8); break;       // FRAME
        case '.': return pop();           // STOP
        case '(': marks_.push_back(stack_.size()); break;
        case ')': push(make(Tuple{})); break;
        case 't': push(make(Tuple{pop_mark()})); break;
        case 0x85: tuple_n(1); break;
        case 0x86: tuple_n(2); break;
        case 0x87: tuple_n(3); break;
        case ']': push(make(List{})); break;
        case 'l': push(make(List{pop_mark()})); break;
        case '}': push(make(Dict{})); break;
        case 'd': {
          auto items = pop_mark();
          Dict d;
          for (std::size_t i = 0; i + 1 < items.size(); i += 2) d.items.emplace_back(items[i], items[i + 1]);
          push(make(std::move(d)));
          break;
        }
        case 0x8f: push(make(List{})); break;  // EMPTY_SET, kept as a list
        case 0x90: {                           // ADDITEMS
          auto items = pop_mark();
          append_all(top(), items);
          break;
        }
        case 0x91: push(make(List{pop_mark()})); break;  // FROZENSET
        case 'a': {
          auto v = pop();
          append_all(top(), {v});
          break;
        }
        case 'e': {
          auto items = pop_mark();
          append_all(top(), items);
          break;
        }
        case 's': {
          auto value = pop();
          auto key = pop();
          set_items(top(), {key, value});
          break;
        }
        case 'u': {
          auto items = pop_mark();
          set_items(top(), items);
          break;
        }
        case 'J': push(make(static_cast<std::int64_t>(static_cast<std::int32_t>(le(4))))); break;
        case 'K': push(make(static_cast<std::int64_t>(u8()))); break;
        case 'M': push(make(static_cast<std::int64_t>(le(2)))); break;
        case 0x8a: push(make(long_bytes(u8()))); break;
        case 0x8b: push(make(long_bytes(le(4)))); break;
        case 'I': push(text_int()); break;
        case 'L': push(text_int()); break;
        case 'G': {
          std::uint64_t bits = 0;
          for (int i = 0; i < 8; ++i) bits = (bits << 8) | u8();
          double d;
          std::memcpy(&d, &bits, 8);
          push(make(d));
          break;
        }
        case 'F': push(make(std::stod(line()))); break;
        case 'N': push(make(std::monostate{})); break;
        case 0x88: push(make(true)); break;
        case 0x89: push(make(false)); break;
        case 'U': push(make(Bytes{bytes(u8())})); break;
        case 'T': push(make(Bytes{bytes(le(4))})); break;
        case 'S': push(make(Bytes{unquote(line())})); break;
        case 'X': push(make(Str{bytes(le(4))})); break;
        case 0x8c: push(make(Str{bytes(u8())})); break;
        case 0x8d: push(make(Str{bytes(le(8))})); break;
        case 'V': push(make(Str{line()})); break;
        case 'C': push(make(Bytes{bytes(u8())})); break;
        case 'B': push(make(Bytes{bytes(le(4))})); break;
        case 0x8e: push(make(Bytes{bytes(le(8))})); break;
        case 0x96: push(make(Bytes{bytes(le(8))})); break;
        case 'c': {
          std::string module = line();
          std::string name = line();
          push(make(Global{module, name}));
          break;
        }
        case 0x93: {
          auto name = pop();
          auto module = pop();
          push(make(Global{text(*module), text(*name)}));
          break;
        }
        case 'R': {
          auto args = pop();
          auto callable = pop();
          push(call(callable, args));
          break;
        }
        case 0x81: {
          auto args = pop();
          auto cls = pop();
          push(make(Object{cls, args, nullptr, {}, {}}));
          break;
        }
        case 0x92: {
          pop();  // kwargs
          auto args = pop();
          auto cls = pop();
          push(make(Object{cls, args, nullptr, {}, {}}));
          break;
        }
        case 'b': {
          auto state = pop();
          auto& target = top();
          if (auto* obj = std::get_if<Object>(&target->v)) {
            obj->state = state;
          } else {
            fail("BUILD on a non-object");
          }
          break;
        }
        case 'p': memo_[to_index(line())] = top(); break;
        case 'q': memo_[u8()] = top(); break;
        case 'r': memo_[le(4)] = top(); break;
        case 0x94: memo_[memo_.size()] = top(); break;
        case 'g': push(memo_at(to_index(line()))); break;
        case 'h': push(memo_at(u8())); break;
        case 'j': push(memo_at(le(4))); break;
        case '0': pop(); break;
        case '1': pop_mark(); break;
        case '2': push(top()); break;
        default:
          fail("unsupported pickle opcode 0x" + hex(op));
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, pos_, what); }

  static std::string hex(std::uint8_t b) {
    const char* digits = "0123456789abcdef";
    return {digits[b >> 4], digits[b & 15]};
  }

  std::uint8_t u8() {
    if (pos_ >= data_.size()) fail("unexpected end of pickle");
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint64_t le(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::string bytes(std::uint64_t n) {
    if (n > data_.size() - pos_) fail("length exceeds pickle size");
    std::string out(data_.substr(pos_, n));
    pos_ += n;
    return out;
  }
  std::string line() {
    auto end = data_.find('\n', pos_);
    if (end == std::string_view::npos) fail("unterminated text field");
    std::string out(data_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  std::int64_t long_bytes(std::uint64_t n) {
    if (n > 8) fail("integer too large");
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    if (n > 0 && n < 8 && (v >> (8 * n - 1)) & 1) v |= ~0ULL << (8 * n);  // sign-extend
    return static_cast<std::int64_t>(v);
  }
  ValuePtr text_int() {
    std::string s = line();
    if (!s.empty() && s.back() == 'L') s.pop_back();
    if (s == "00") return make(false);
    if (s == "01") return make(true);
    return make(static_cast<std::int64_t>(std::stoll(s)));
  }
  static std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"')) s = s.substr(1, s.size() - 2);
    return s;
  }
  std::size_t to_index(const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); }

  void push(ValuePtr v) { stack_.push_back(std::move(v)); }
  ValuePtr pop() {
    if (stack_.empty() || (!marks_.empty() && stack_.size() <= marks_.back())) fail("stack underflow");
    auto v = stack_.back();
    stack_.pop_back();
    return v;
  }
  ValuePtr& top() {
    if (stack_.empty()) fail("stack underflow");
    return stack_.back();
  }
  std::vector<ValuePtr> pop_mark() {
    if (marks_.empty()) fail("missing MARK");
    const std::size_t m = marks_.back();
    marks_.pop_back();
    std::vector<ValuePtr> items(stack_.begin() + static_cast<std::ptrdiff_t>(m), stack_.end());
    stack_.resize(m);
    return items;
  }
  void tuple_n(std::size_t n) {
    if (stack_.size() < n) fail("stack underflow");
    Tuple t;
    t.items.assign(stack_.end() - static_cast<std::ptrdiff_t>(n), stack_.end());
    stack_.resize(stack_.size() - n);
    push(make(std::move(t)));
  }
  ValuePtr memo_at(std::size_t i) {
    auto it = memo_.find(i);
    if (it == memo_.end()) fail("memo key missing");
    return it->second;
  }

  void append_all(ValuePtr& target, const std::vector<ValuePtr>& items) {
    if (auto* l = std::get_if<List>(&target->v)) {
      l->items.insert(l->items.end(), items.begin(), items.end());
    } else if (auto* o = std::get_if<Object>(&target->v)) {
      o->list_items.insert(o->list_items.end(), items.begin(), items.end());
    } else {
      fail("APPEND on a non-list");
    }
  }
  void set_items(ValuePtr& target, const std::vector<ValuePtr>& items) {
    auto add = [&](auto& dest) {
      for (std::size_t i = 0; i + 1 < items.size(); i += 2) dest.emplace_back(items[i], items[i + 1]);
    };
    if (auto* d = std::get_if<Dict>(&target->v)) {
      add(d->items);
    } else if (auto* o = std::get_if<Object>(&target->v)) {
      add(o->dict_items);
    } else {
      fail("SETITEM on a non-dict");
    }
  }

  static std::string text(const Value& v) {
    if (auto* s = std::get_if<Str>(&v.v)) return s->utf8;
    if (auto* b = std::get_if<Bytes>(&v.v)) return b->data;
    return {};
  }

  // _codecs.encode(text, 'latin1') is how protocol-2 pickles from Python 3 carry bytes.
  ValuePtr call(const ValuePtr& callable, const ValuePtr& args) {
    if (auto* g = std::get_if<Global>(&callable->v)) {
      if (g->module == "_codecs" && g->name == "encode") {
        auto* t = std::get_if<Tuple>(&args->v);
        if (t && !t->items.empty()) {
          if (auto* s = std::get_if<Str>(&t->items[0]->v)) return make(Bytes{utf8_to_latin1(s->utf8)});
        }
      }
    }
    return make(Object{callable, args, nullptr, {}, {}});
  }

  std::string utf8_to_latin1(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
      const auto c = static_cast<unsigned char>(in[i]);
      if (c < 0x80) {
        out.push_back(static_cast<char>(c));
        i += 1;
      } else if ((c & 0xe0) == 0xc0 && i + 1 < in.size()) {
        const unsigned cp = ((c & 0x1fu) << 6) | (static_cast<unsigned char>(in[i + 1]) & 0x3fu);
        if (cp > 0xff) fail("code point outside latin-1");
        out.push_back(static_cast<char>(cp));
        i += 2;
      } else {
        fail("code point outside latin-1");
      }
    }
    return out;
  }

  std::string_view data_;
  std::string source_;
  std::size_t pos_ = 0;
  std::vector<ValuePtr> stack_;
  std::vector<std::size_t> marks_;
  std::unordered_map<std::size_t, ValuePtr> memo_;
};

const Global* as_global(const ValuePtr& v) { return v ? std::get_if<Global>(&v->v) : nullptr; }

std::string text_of(const Value& v) {
  if (auto* s = std::get_if<Str>(&v.v)) return s->utf8;
  if (auto* b = std::get_if<Bytes>(&v.v)) return b->data;
  throw ParseError("<pickle>", 0, "expected a string");
}

std::int64_t int_of(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v.v)) return *i;
  if (auto* b = std::get_if<bool>(&v.v)) return *b ? 1 : 0;
  throw ParseError("<pickle>", 0, "expected an integer");
}

const std::vector<ValuePtr>& sequence_of(const Value& v) {
  if (auto* t = std::get_if<Tuple>(&v.v)) return t->items;
  if (auto* l = std::get_if<List>(&v.v)) return l->items;
  throw ParseError("<pickle>", 0, "expected a tuple or list");
}

std::vector<std::int64_t> int_array(const NdArray& a) {
  std::vector<std::int64_t> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int64_t>(a.at(i));
  return out;
}

}  // namespace

ValuePtr load(std::string_view data, const std::string& source) { return Reader(data, source).run(); }

std::string class_name(const Value& value) {
  const auto* obj = std::get_if<Object>(&value.v);
  if (!obj) return {};
  const Global* g = as_global(obj->callable);
  if (!g) return {};
  // copy_reg._reconstructor(cls, base, state): the class is the first argument.
  if (g->name == "_reconstructor" && obj->args) {
    if (auto* t = std::get_if<Tuple>(&obj->args->v); t && !t->items.empty()) {
      if (const Global* cls = as_global(t->items[0])) return cls->module + "." + cls->name;
    }
  }
  return g->module + "." + g->name;
}

std::size_t NdArray::size() const {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

double NdArray::at(std::size_t i) const {
  const char* p = data.data() + i * itemsize;
  switch (kind) {
    case 'f':
      if (itemsize == 8) {
        double d;
        std::memcpy(&d, p, 8);
        return d;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        return f;
      }
    case 'i': {
      std::int64_t v = 0;
      std::memcpy(&v, p, itemsize);
      if (itemsize < 8 && (v >> (8 * itemsize - 1)) & 1) v |= ~0LL << (8 * itemsize);
      return static_cast<double>(v);
    }
    case 'u':
    case 'b': {
      std::uint64_t v = 0;
      std::memcpy(&v, p, itemsize);
      return static_cast<double>(v);
    }
    default:
      throw ParseError("<pickle>", 0, "unsupported array dtype");
  }
}

double NdArray::at(std::size_t row, std::size_t col) const {
  if (shape.size() != 2) throw ParseError("<pickle>", 0, "array is not 2-D");
  return fortran_order ? at(col * shape[0] + row) : at(row * shape[1] + col);
}

NdArray as_ndarray(const Value& value) {
  const auto* obj = std::get_if<Object>(&value.v);
  if (!obj || !obj->state) throw ParseError("<pickle>", 0, "not a numpy array");
  const auto& st = sequence_of(*obj->state);
  if (st.size() != 5) throw ParseError("<pickle>", 0, "unexpected numpy array state");

  NdArray a;
  for (const auto& s : sequence_of(*st[1])) a.shape.push_back(static_cast<std::size_t>(int_of(*s)));

  const auto* dtype = std::get_if<Object>(&st[2]->v);
  if (!dtype || !dtype->args) throw ParseError("<pickle>", 0, "missing numpy dtype");
  const std::string descr = text_of(*sequence_of(*dtype->args).at(0));
  if (descr.size() < 2 || std::string("fiub").find(descr[0]) == std::string::npos) {
    throw ParseError("<pickle>", 0, "unsupported numpy dtype '" + descr + "'");
  }
  a.kind = descr[0];
  a.itemsize = static_cast<std::size_t>(std::stoul(descr.substr(1)));
  char order = '<';
  if (dtype->state) {
    const auto& ds = sequence_of(*dtype->state);
    if (ds.size() > 1) {
      const std::string o = text_of(*ds[1]);
      if (!o.empty()) order = o[0];
    }
  }
  a.fortran_order = int_of(*st[3]) != 0;
  a.data = text_of(*st[4]);
  if (a.data.size() != a.size() * a.itemsize) throw ParseError("<pickle>", 0, "array data size mismatch");
  if (order == '>' && a.itemsize > 1) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::reverse(a.data.begin() + static_cast<std::ptrdiff_t>(i * a.itemsize),
                   a.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.itemsize));
    }
  }
  return a;
}

CsrMatrix as_csr(const Value& value) {
  const auto* obj = std::get_if<Object>(&value.v);
  if (!obj || !obj->state) throw ParseError("<pickle>", 0, "not a scipy sparse matrix");
  const auto* state = std::get_if<Dict>(&obj->state->v);
  if (!state) throw ParseError("<pickle>", 0, "unexpected sparse matrix state");
  CsrMatrix m;
  bool have_shape = false;
  std::string format = "csr";
  for (const auto& [k, v] : state->items) {
    const std::string key = text_of(*k);
    if (key == "_shape" || key == "shape") {
      const auto& s = sequence_of(*v);
      m.rows = static_cast<std::size_t>(int_of(*s.at(0)));
      m.cols = static_cast<std::size_t>(int_of(*s.at(1)));
      have_shape = true;
    } else if (key == "indptr") {
      m.indptr = int_array(as_ndarray(*v));
    } else if (key == "indices") {
      m.indices = int_array(as_ndarray(*v));
    } else if (key == "data") {
      auto a = as_ndarray(*v);
      m.values.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) m.values[i] = a.at(i);
    } else if (key == "format") {
      format = text_of(*v);
    }
  }
  if (format != "csr") throw ParseError("<pickle>", 0, "sparse format '" + format + "' unsupported");
  if (!have_shape || m.indptr.size() != m.rows + 1 || m.indices.size() != m.values.size() ||
      (m.indptr.empty() ? 0 : static_cast<std::size_t>(m.indptr.back())) != m.values.size()) {
    throw ParseError("<pickle>", 0, "inconsistent CSR matrix");
  }
  for (auto c : m.indices) {
    if (c < 0 || static_cast<std::size_t>(c) >= m.cols) throw ParseError("<pickle>", 0, "CSR column out of range");
  }
  return m;
}

std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> as_int_adjacency(const Value& value) {
  const std::vector<std::pair<ValuePtr, ValuePtr>>* items = nullptr;
  if (auto* d = std::get_if<Dict>(&value.v)) {
    items = &d->items;
  } else if (auto* o = std::get_if<Object>(&value.v)) {
    items = &o->dict_items;
  } else {
    throw ParseError("<pickle>", 0, "adjacency is not a dict");
  }
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> out;
  out.reserve(items->size());
  for (const auto& [k, v] : *items) {
    std::vector<std::int64_t> nbrs;
    for (const auto& x : sequence_of(*v)) nbrs.push_back(int_of(*x));
    out.emplace_back(int_of(*k), std::move(nbrs));
  }
  return out;
}

}  // namespace imverde::pickle
