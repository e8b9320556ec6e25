#include "sepwand/sort.hpp"

#include <map>
#include <mutex>

namespace sepwand {
namespace {

struct ShapeRegistry {
  std::vector<AggShape> shapes;
  std::map<std::string, int> names;  // optional symbolic names for shapes
  std::mutex mu;

  ShapeRegistry() {
    AggShape i;
    i.leaf = true;
    i.leaf_kind = SortKind::Int;
    shapes.push_back(i);  // id 0
    AggShape v;
    v.leaf = true;
    v.leaf_kind = SortKind::Val;
    shapes.push_back(v);  // id 1
  }
};

ShapeRegistry& reg() {
  static ShapeRegistry r;
  return r;
}

}  // namespace

int agg_shape_int() { return 0; }
int agg_shape_val() { return 1; }

int agg_shape_tuple(const std::vector<int>& fields) {
  if (fields.empty()) throw ShapeError("empty tuple shape");
  auto& r = reg();
  std::lock_guard<std::mutex> lock(r.mu);
  for (int f : fields) {
    if (f < 0 || f >= (int)r.shapes.size()) throw ShapeError("unknown field shape id");
  }
  for (int id = 0; id < (int)r.shapes.size(); ++id) {
    if (!r.shapes[id].leaf && r.shapes[id].fields == fields) return id;
  }
  AggShape s;
  s.leaf = false;
  s.fields = fields;
  s.leaf_count = 0;
  for (int f : fields) s.leaf_count += r.shapes[f].leaf_count;
  r.shapes.push_back(s);
  return (int)r.shapes.size() - 1;
}

const AggShape& agg_shape(int id) {
  auto& r = reg();
  std::lock_guard<std::mutex> lock(r.mu);
  if (id < 0 || id >= (int)r.shapes.size()) throw ShapeError("unknown shape id");
  return r.shapes[id];
}

void register_agg_name(const std::string& name, int id) {
  auto& r = reg();
  std::lock_guard<std::mutex> lock(r.mu);
  if (id < 0 || id >= (int)r.shapes.size()) throw ShapeError("unknown shape id");
  auto it = r.names.find(name);
  if (it != r.names.end() && it->second != id)
    throw ShapeError("shape name '" + name + "' already bound");
  r.names[name] = id;
}

int lookup_agg_name(const std::string& name) {
  auto& r = reg();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.names.find(name);
  return it == r.names.end() ? -1 : it->second;
}

std::string agg_shape_str(int id) {
  const AggShape s = agg_shape(id);  // copy; avoids holding the lock
  if (s.leaf) return s.leaf_kind == SortKind::Int ? "int" : "val";
  {
    auto& r = reg();
    std::lock_guard<std::mutex> lock(r.mu);
    for (const auto& [name, nid] : r.names) {
      if (nid == id) return name;
    }
  }
  std::string out = "(";
  for (size_t i = 0; i < s.fields.size(); ++i) {
    if (i) out += ' ';
    out += agg_shape_str(s.fields[i]);
  }
  return out + ")";
}

std::string Sort::str() const {
  switch (kind) {
    case SortKind::Val: return "Val";
    case SortKind::Int: return "Int";
    case SortKind::Tree: return "Tree";
    case SortKind::List: return "List";
    case SortKind::Ctx: return "Ctx";
    case SortKind::Path: return "Path";
    case SortKind::Map: return "Map";
    case SortKind::Agg: return "Agg:" + agg_shape_str(shape);
  }
  return "?";
}

namespace {

// Shape syntax: int | val | <registered name> | (<shape> <shape> ...)
int parse_shape(const std::string& s, size_t& i) {
  while (i < s.size() && s[i] == ' ') ++i;
  if (i >= s.size()) throw ParseError(0, "truncated aggregate shape");
  if (s[i] == '(') {
    ++i;
    std::vector<int> fields;
    while (true) {
      while (i < s.size() && s[i] == ' ') ++i;
      if (i < s.size() && s[i] == ')') {
        ++i;
        break;
      }
      fields.push_back(parse_shape(s, i));
    }
    return agg_shape_tuple(fields);
  }
  size_t j = i;
  while (j < s.size() && s[j] != ' ' && s[j] != '(' && s[j] != ')') ++j;
  std::string word = s.substr(i, j - i);
  i = j;
  if (word == "int") return agg_shape_int();
  if (word == "val") return agg_shape_val();
  int id = lookup_agg_name(word);
  if (id < 0) throw ParseError(0, "unknown aggregate shape '" + word + "'");
  return id;
}

}  // namespace

Sort parse_sort(const std::string& text) {
  if (text == "Val") return SortKind::Val;
  if (text == "Int") return SortKind::Int;
  if (text == "Tree") return SortKind::Tree;
  if (text == "List") return SortKind::List;
  if (text == "Ctx") return SortKind::Ctx;
  if (text == "Path") return SortKind::Path;
  if (text == "Map") return SortKind::Map;
  if (text.rfind("Agg:", 0) == 0) {
    size_t i = 4;
    int id = parse_shape(text, i);
    while (i < text.size() && text[i] == ' ') ++i;
    if (i != text.size()) throw ParseError(0, "trailing junk in sort '" + text + "'");
    return Sort::agg(id);
  }
  throw ParseError(0, "unknown sort '" + text + "'");
}

}  // namespace sepwand
