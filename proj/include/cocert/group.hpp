#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cocert/error.hpp"

namespace cocert {

/// Signed generator letters: +i is the i-th generator (1-based), -i its inverse.
using Word = std::vector<int>;

struct RewriteRule {
  Word lhs;
  Word rhs;
};

struct GroupDescriptor {
  enum class Kind { Free, FinitePermutation, Rewriting };

  Kind kind = Kind::Free;
  std::vector<std::string> generators;

  // FinitePermutation: one image array per generator, all over {0..degree-1}.
  std::vector<std::vector<int>> permutations;
  std::size_t degree = 0;

  // Rewriting: rules are trusted to be confluent; termination is guarded by step_budget.
  std::vector<RewriteRule> rules;
  // Optional replacement word for the inverse of a generator (key is the 1-based index).
  // Lets finite groups be presented without inverse letters, e.g. a^-1 -> a a in Z/3.
  std::map<int, Word> inverse_words;

  // Named homomorphisms onto permutation groups, given by generator images.
  std::map<std::string, std::vector<std::vector<int>>> quotients;

  std::size_t step_budget = 100000;
  std::size_t size_cap = 50000;
};

std::string_view kind_name(GroupDescriptor::Kind kind);

/// Canonical form plus the identity of the group that produced it.
struct GroupElement {
  std::uint64_t group_id = 0;
  std::vector<int> form;

  auto operator<=>(const GroupElement&) const = default;
};

/// Breadth-first Cayley data of a finite group: elements in canonical ball order,
/// their shortlex-minimal words and right multiplication by each letter.
struct CayleyTable {
  std::vector<GroupElement> elements;
  std::vector<Word> words;  // permutation backend only; other forms are words already
  std::map<std::vector<int>, std::size_t> index;
  std::vector<std::vector<std::size_t>> right_mul;  // [element][letter slot]
};

class Group {
 public:
  using Kind = GroupDescriptor::Kind;

  /// Validates the descriptor. Throws Error(InvalidDescriptor) on malformed data.
  static std::shared_ptr<const Group> create(GroupDescriptor descriptor);

  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  const GroupDescriptor& descriptor() const { return desc_; }
  Kind kind() const { return desc_.kind; }
  std::size_t rank() const { return desc_.generators.size(); }
  std::uint64_t id() const { return id_; }

  GroupElement identity() const;
  bool is_identity(const GroupElement& a) const;
  GroupElement normalize(const Word& word) const;
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement invert(const GroupElement& a) const;

  /// Elements of word length <= radius in (length, lexicographic) order.
  std::vector<GroupElement> ball(std::size_t radius) const;
  std::vector<GroupElement> enumerate() const;
  /// Group order if the group closes under the size cap.
  std::optional<std::size_t> order() const;

  /// A word representing `a`; shortlex-minimal for permutation groups.
  Word word_of(const GroupElement& a) const;
  std::size_t word_length(const GroupElement& a) const;
  std::string format(const GroupElement& a) const;
  std::string format_letter(int letter) const;

  std::shared_ptr<const Group> quotient(const std::string& hom) const;
  GroupElement push_forward(const GroupElement& a, const std::string& hom) const;

  /// Throws NotFiniteUnderCap for infinite groups.
  const CayleyTable& cayley() const;

  /// Letter slots order the alphabet as a, a^-1, b, b^-1, ...
  std::size_t letter_count() const { return 2 * rank(); }
  int letter_at(std::size_t slot) const;
  static std::size_t slot_of(int letter);
  static bool word_less(const Word& a, const Word& b);

 private:
  explicit Group(GroupDescriptor descriptor);

  void check_letter(int letter) const;
  void check_same(const GroupElement& a) const;
  std::vector<int> perm_of_letter(int letter) const;
  Word reduce_rewriting(Word word) const;
  void build_cayley() const;

  GroupDescriptor desc_;
  std::uint64_t id_;
  std::map<std::string, std::shared_ptr<const Group>> quotients_;

  mutable std::once_flag cayley_once_;
  mutable std::unique_ptr<CayleyTable> cayley_;
  mutable std::optional<Error> cayley_error_;
};

using GroupPtr = std::shared_ptr<const Group>;

/// Checks that generator images define a homomorphism. Free groups have no relations;
/// rewriting groups are checked on every rule and declared inverse word; permutation
/// groups are checked on every edge of the Cayley graph. Returns a description of the
/// first violated relation.
template <class Image, class LetterImage, class Mul, class Eq>
std::optional<std::string> find_relation_violation(const Group& group, const Image& identity,
                                                   LetterImage letter_image, Mul mul, Eq eq) {
  auto eval = [&](const Word& w) {
    Image acc = identity;
    for (int x : w) acc = mul(acc, letter_image(x));
    return acc;
  };
  switch (group.kind()) {
    case Group::Kind::Free:
      return std::nullopt;
    case Group::Kind::Rewriting: {
      const auto& d = group.descriptor();
      for (std::size_t i = 0; i < d.rules.size(); ++i)
        if (!eq(eval(d.rules[i].lhs), eval(d.rules[i].rhs)))
          return "rule " + std::to_string(i) + " does not hold";
      for (const auto& [gen, word] : d.inverse_words) {
        Word w{gen};
        w.insert(w.end(), word.begin(), word.end());
        if (!eq(eval(w), identity))
          return "declared inverse of generator " + std::to_string(gen) + " does not hold";
      }
      return std::nullopt;
    }
    case Group::Kind::FinitePermutation: {
      const CayleyTable& table = group.cayley();
      std::vector<Image> images;
      images.reserve(table.elements.size());
      for (const Word& w : table.words) images.push_back(eval(w));
      for (std::size_t e = 0; e < table.elements.size(); ++e)
        for (std::size_t s = 0; s < group.letter_count(); ++s) {
          Image lhs = mul(images[e], letter_image(group.letter_at(s)));
          if (!eq(lhs, images[table.right_mul[e][s]]))
            return "Cayley relation fails at " + group.format(table.elements[e]) + " * " +
                   group.format_letter(group.letter_at(s));
        }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace cocert
