#include "cocert/group.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>

namespace cocert {

namespace {

std::atomic<std::uint64_t> next_group_id{1};

std::vector<int> identity_perm(std::size_t m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  // (a*b)(i) = a(b(i)): b acts first, matching matrix products of permutation matrices.
  std::vector<int> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[static_cast<std::size_t>(b[i])];
  return out;
}

std::vector<int> inverse_perm(const std::vector<int>& a) {
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
  return out;
}

bool is_bijection(const std::vector<int>& p, std::size_t m) {
  if (p.size() != m) return false;
  std::vector<bool> seen(m, false);
  for (int x : p) {
    if (x < 0 || static_cast<std::size_t>(x) >= m || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = true;
  }
  return true;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

}  // namespace

std::string_view kind_name(GroupDescriptor::Kind kind) {
  switch (kind) {
    case GroupDescriptor::Kind::Free: return "free";
    case GroupDescriptor::Kind::FinitePermutation: return "finite-permutation";
    case GroupDescriptor::Kind::Rewriting: return "rewriting";
  }
  return "free";
}

std::size_t Group::slot_of(int letter) {
  std::size_t g = static_cast<std::size_t>(letter > 0 ? letter : -letter) - 1;
  return 2 * g + (letter < 0 ? 1 : 0);
}

int Group::letter_at(std::size_t slot) const {
  int g = static_cast<int>(slot / 2) + 1;
  return slot % 2 == 0 ? g : -g;
}

bool Group::word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return slot_of(a[i]) < slot_of(b[i]);
  return false;
}

std::shared_ptr<const Group> Group::create(GroupDescriptor descriptor) {
  return std::shared_ptr<const Group>(new Group(std::move(descriptor)));
}

Group::Group(GroupDescriptor descriptor) : desc_(std::move(descriptor)), id_(next_group_id++) {
  std::set<std::string> names;
  for (const auto& name : desc_.generators) {
    if (name.empty()) throw Error(ErrorCode::InvalidDescriptor, "generator names must be nonempty");
    if (!names.insert(name).second)
      throw Error(ErrorCode::InvalidDescriptor, "duplicate generator name '" + name + "'");
  }
  const std::size_t r = rank();

  if (desc_.kind == Kind::FinitePermutation) {
    if (desc_.permutations.size() != r)
      throw Error(ErrorCode::InvalidDescriptor, "need one image array per generator");
    if (desc_.degree == 0) desc_.degree = r == 0 ? 1 : desc_.permutations[0].size();
    for (std::size_t i = 0; i < r; ++i)
      if (!is_bijection(desc_.permutations[i], desc_.degree))
        throw Error(ErrorCode::InvalidDescriptor,
                    "image array of '" + desc_.generators[i] + "' is not a bijection of {0.." +
                        std::to_string(desc_.degree - 1) + "}");
  } else if (!desc_.permutations.empty()) {
    throw Error(ErrorCode::InvalidDescriptor, "image arrays are only allowed for permutation groups");
  }

  if (desc_.kind == Kind::Rewriting) {
    for (std::size_t i = 0; i < desc_.rules.size(); ++i) {
      const auto& rule = desc_.rules[i];
      if (rule.lhs.empty()) throw Error(ErrorCode::InvalidDescriptor, "rule with empty left side");
      for (int x : rule.lhs) check_letter(x);
      for (int x : rule.rhs) check_letter(x);
      bool shortens = rule.rhs.size() < rule.lhs.size();
      bool lex_decrease = rule.rhs.size() == rule.lhs.size() && word_less(rule.rhs, rule.lhs);
      if (!shortens && !lex_decrease)
        throw Error(ErrorCode::InvalidDescriptor,
                    "rule " + std::to_string(i) + " neither shortens nor decreases lexicographically");
    }
    for (const auto& [gen, word] : desc_.inverse_words) {
      if (gen < 1 || static_cast<std::size_t>(gen) > r)
        throw Error(ErrorCode::InvalidDescriptor, "inverse declared for unknown generator");
      for (int x : word) {
        check_letter(x);
        if (x < 0 && desc_.inverse_words.count(-x))
          throw Error(ErrorCode::InvalidDescriptor,
                      "inverse words may not use inverse letters that are themselves replaced");
      }
    }
  } else if (!desc_.rules.empty() || !desc_.inverse_words.empty()) {
    throw Error(ErrorCode::InvalidDescriptor, "rewriting rules are only allowed for rewriting groups");
  }

  for (const auto& [name, images] : desc_.quotients) {
    if (images.size() != r)
      throw Error(ErrorCode::InvalidDescriptor, "quotient '" + name + "' needs one image per generator");
    GroupDescriptor qd;
    qd.kind = Kind::FinitePermutation;
    qd.generators = desc_.generators;
    qd.permutations = images;
    qd.degree = r == 0 ? 1 : images[0].size();
    qd.size_cap = desc_.size_cap;
    auto q = create(std::move(qd));
    quotients_.emplace(name, q);
  }
  // Relation checks need a fully built object (cayley() for permutation sources).
  for (const auto& [name, q] : quotients_) {
    auto violation = find_relation_violation(
        *this, q->identity(), [&](int x) { return q->normalize(Word{x}); },
        [&](const GroupElement& a, const GroupElement& b) { return q->mul(a, b); },
        [](const GroupElement& a, const GroupElement& b) { return a == b; });
    if (violation)
      throw Error(ErrorCode::InvalidDescriptor, "quotient '" + name + "' is not a homomorphism: " + *violation);
  }
}

void Group::check_letter(int letter) const {
  if (letter == 0 || static_cast<std::size_t>(letter > 0 ? letter : -letter) > rank())
    throw Error(ErrorCode::UnknownGenerator, "unknown generator index " + std::to_string(letter));
}

void Group::check_same(const GroupElement& a) const {
  if (a.group_id != id_) throw Error(ErrorCode::BackendMismatch, "element belongs to a different group");
}

std::vector<int> Group::perm_of_letter(int letter) const {
  const auto& p = desc_.permutations[static_cast<std::size_t>(letter > 0 ? letter : -letter) - 1];
  return letter > 0 ? p : inverse_perm(p);
}

GroupElement Group::identity() const {
  if (kind() == Kind::FinitePermutation) return {id_, identity_perm(desc_.degree)};
  return {id_, {}};
}

bool Group::is_identity(const GroupElement& a) const { return a == identity(); }

Word Group::reduce_rewriting(Word word) const {
  Word expanded;
  expanded.reserve(word.size());
  for (int x : word) {
    if (x < 0) {
      if (auto it = desc_.inverse_words.find(-x); it != desc_.inverse_words.end()) {
        expanded.insert(expanded.end(), it->second.begin(), it->second.end());
        continue;
      }
    }
    expanded.push_back(x);
  }
  Word w = free_reduce(expanded);
  std::size_t steps = 0;
  while (true) {
    // Leftmost match; ties broken by rule order.
    std::size_t best_pos = w.size();
    const RewriteRule* best = nullptr;
    for (const auto& rule : desc_.rules) {
      if (rule.lhs.size() > w.size()) continue;
      auto it = std::search(w.begin(), w.end(), rule.lhs.begin(), rule.lhs.end());
      if (it == w.end()) continue;
      auto pos = static_cast<std::size_t>(it - w.begin());
      if (pos < best_pos) {
        best_pos = pos;
        best = &rule;
      }
    }
    if (!best) break;
    if (++steps > desc_.step_budget)
      throw Error(ErrorCode::RuleLoopGuard,
                  "rewriting exceeded the step budget of " + std::to_string(desc_.step_budget));
    Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(best_pos));
    next.insert(next.end(), best->rhs.begin(), best->rhs.end());
    next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(best_pos + best->lhs.size()), w.end());
    w = free_reduce(next);
  }
  return w;
}

GroupElement Group::normalize(const Word& word) const {
  for (int x : word) check_letter(x);
  switch (kind()) {
    case Kind::Free:
      return {id_, free_reduce(word)};
    case Kind::Rewriting:
      return {id_, reduce_rewriting(word)};
    case Kind::FinitePermutation: {
      std::vector<int> p = identity_perm(desc_.degree);
      for (int x : word) p = compose(p, perm_of_letter(x));
      return {id_, std::move(p)};
    }
  }
  return identity();
}

GroupElement Group::mul(const GroupElement& a, const GroupElement& b) const {
  check_same(a);
  check_same(b);
  if (kind() == Kind::FinitePermutation) return {id_, compose(a.form, b.form)};
  Word w = a.form;
  w.insert(w.end(), b.form.begin(), b.form.end());
  if (kind() == Kind::Free) return {id_, free_reduce(w)};
  return {id_, reduce_rewriting(std::move(w))};
}

GroupElement Group::invert(const GroupElement& a) const {
  check_same(a);
  if (kind() == Kind::FinitePermutation) return {id_, inverse_perm(a.form)};
  Word w(a.form.rbegin(), a.form.rend());
  for (int& x : w) x = -x;
  if (kind() == Kind::Free) return {id_, std::move(w)};
  return {id_, reduce_rewriting(std::move(w))};
}

std::vector<GroupElement> Group::ball(std::size_t radius) const {
  std::vector<GroupElement> out{identity()};
  std::set<std::vector<int>> seen{out[0].form};
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= radius; ++len) {
    std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (std::size_t s = 0; s < letter_count(); ++s) {
        GroupElement next = mul(out[i], normalize(Word{letter_at(s)}));
        if (seen.insert(next.form).second) {
          out.push_back(std::move(next));
          if (out.size() > desc_.size_cap)
            throw Error(ErrorCode::SizeCapExceeded,
                        "ball of radius " + std::to_string(radius) + " exceeds " +
                            std::to_string(desc_.size_cap) + " elements");
        }
      }
    if (out.size() == level_end) break;  // closed: no larger radius adds anything
    level_begin = level_end;
  }
  return out;
}

void Group::build_cayley() const {
  // A free group of positive rank never closes; BFS would only burn memory.
  if (kind() == Kind::Free && rank() > 0)
    throw Error(ErrorCode::NotFiniteUnderCap, "free group of rank " + std::to_string(rank()) + " is infinite");
  const bool keep_words = kind() == Kind::FinitePermutation;
  auto table = std::make_unique<CayleyTable>();
  table->elements.push_back(identity());
  table->words.push_back({});
  table->index.emplace(identity().form, 0);
  std::vector<GroupElement> letters;
  for (std::size_t s = 0; s < letter_count(); ++s) letters.push_back(normalize(Word{letter_at(s)}));
  for (std::size_t i = 0; i < table->elements.size(); ++i) {
    std::vector<std::size_t> row(letter_count());
    for (std::size_t s = 0; s < letter_count(); ++s) {
      GroupElement next = mul(table->elements[i], letters[s]);
      auto [it, inserted] = table->index.emplace(next.form, table->elements.size());
      if (inserted) {
        if (table->elements.size() >= desc_.size_cap)
          throw Error(ErrorCode::NotFiniteUnderCap,
                      "group does not close within " + std::to_string(desc_.size_cap) + " elements");
        if (keep_words) {
          Word w = table->words[i];
          w.push_back(letter_at(s));
          table->words.push_back(std::move(w));
        }
        table->elements.push_back(std::move(next));
      }
      row[s] = it->second;
    }
    table->right_mul.push_back(std::move(row));
  }
  cayley_ = std::move(table);
}

const CayleyTable& Group::cayley() const {
  std::call_once(cayley_once_, [this] {
    try {
      build_cayley();
    } catch (const Error& e) {
      cayley_error_.emplace(e);
    }
  });
  if (cayley_error_) throw *cayley_error_;
  return *cayley_;
}

std::vector<GroupElement> Group::enumerate() const { return cayley().elements; }

std::optional<std::size_t> Group::order() const {
  try {
    return cayley().elements.size();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFiniteUnderCap) return std::nullopt;
    throw;
  }
}

Word Group::word_of(const GroupElement& a) const {
  check_same(a);
  if (kind() != Kind::FinitePermutation) return a.form;
  const CayleyTable& table = cayley();
  return table.words.at(table.index.at(a.form));
}

std::size_t Group::word_length(const GroupElement& a) const { return word_of(a).size(); }

std::string Group::format_letter(int letter) const {
  const std::string& name = desc_.generators[static_cast<std::size_t>(letter > 0 ? letter : -letter) - 1];
  return letter > 0 ? name : name + "^-1";
}

std::string Group::format(const GroupElement& a) const {
  Word w = word_of(a);
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += ' ';
    const std::string& name = desc_.generators[static_cast<std::size_t>(w[i] > 0 ? w[i] : -w[i]) - 1];
    long power = static_cast<long>(j - i) * (w[i] > 0 ? 1 : -1);
    out += name;
    if (power != 1) out += "^" + std::to_string(power);
    i = j;
  }
  return out;
}

std::shared_ptr<const Group> Group::quotient(const std::string& hom) const {
  auto it = quotients_.find(hom);
  if (it == quotients_.end()) throw Error(ErrorCode::UnknownHom, "unknown homomorphism '" + hom + "'");
  return it->second;
}

GroupElement Group::push_forward(const GroupElement& a, const std::string& hom) const {
  auto q = quotient(hom);
  return q->normalize(word_of(a));
}

}  // namespace cocert
