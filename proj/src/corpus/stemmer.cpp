#include "textgraph/corpus/stemmer.hpp"

#include <array>
#include <functional>
#include <utility>

namespace textgraph::corpus {

namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::string_view drop(std::string_view w, std::size_t n) {
    return n >= w.size() ? std::string_view{} : w.substr(0, w.size() - n);
}

// ---------------------------------------------------------------------------
// Porter

bool porter_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' is a consonant at the start of a word or after a vowel.
bool is_consonant(std::string_view w, std::size_t i) {
    if (porter_vowel(w[i])) return false;
    if (w[i] != 'y') return true;
    bool negate = false;
    while (i > 0 && w[i] == 'y') {
        negate = !negate;
        --i;
    }
    return (!porter_vowel(w[i])) != negate;
}

// m in [C](VC){m}[V]
int measure(std::string_view stem) {
    int m = 0;
    bool prev_consonant = true;  // nothing before the first letter
    for (std::size_t i = 0; i < stem.size(); ++i) {
        const char c = stem[i];
        const bool consonant = porter_vowel(c) ? false : (c != 'y' || i == 0 || !prev_consonant);
        if (consonant && !prev_consonant) ++m;
        prev_consonant = consonant;
    }
    return m;
}

bool contains_vowel(std::string_view stem) {
    for (std::size_t i = 0; i < stem.size(); ++i)
        if (!is_consonant(stem, i)) return true;
    return false;
}

bool ends_double_consonant(std::string_view w) {
    return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_consonant(w, w.size() - 1);
}

// *o: ends consonant-vowel-consonant, final consonant not w, x or y
bool ends_cvc(std::string_view w) {
    if (w.size() < 3) return false;
    const std::size_t n = w.size();
    const char last = w[n - 1];
    return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
           last != 'w' && last != 'x' && last != 'y';
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
    bool (*condition)(std::string_view stem);
};

bool m_gt_0(std::string_view stem) { return measure(stem) > 0; }
bool m_gt_1(std::string_view stem) { return measure(stem) > 1; }
bool ion_condition(std::string_view stem) {
    return measure(stem) > 1 && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
}

// First rule whose suffix matches decides; a failed condition stops the list.
template <std::size_t N>
std::string apply_rules(std::string word, const std::array<Rule, N>& rules) {
    for (const Rule& rule : rules) {
        if (!ends_with(word, rule.suffix)) continue;
        const std::string_view stem = std::string_view(word).substr(0, word.size() - rule.suffix.size());
        if (rule.condition == nullptr || rule.condition(stem)) {
            return std::string(stem) + std::string(rule.replacement);
        }
        return word;
    }
    return word;
}

std::string porter_step1a(std::string w) {
    static constexpr std::array<Rule, 4> rules{{
        {"sses", "ss", nullptr},
        {"ies", "i", nullptr},
        {"ss", "ss", nullptr},
        {"s", "", nullptr},
    }};
    return apply_rules(std::move(w), rules);
}

std::string porter_step1b(std::string w) {
    if (ends_with(w, "eed")) {
        const std::string_view stem = drop(w, 3);
        return measure(stem) > 0 ? std::string(stem) + "ee" : w;
    }
    std::string stem;
    bool stripped = false;
    for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
        if (ends_with(w, suffix)) {
            const std::string_view candidate = drop(w, suffix.size());
            if (contains_vowel(candidate)) {
                stem = std::string(candidate);
                stripped = true;
                break;
            }
        }
    }
    if (!stripped) return w;

    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
    if (ends_double_consonant(stem)) {
        const char last = stem.back();
        if (last != 'l' && last != 's' && last != 'z') return std::string(drop(stem, 1));
        return stem;
    }
    if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
    return stem;
}

std::string porter_step1c(std::string w) {
    if (ends_with(w, "y") && contains_vowel(drop(w, 1))) {
        w.back() = 'i';
    }
    return w;
}

std::string porter_step2(std::string w) {
    static constexpr std::array<Rule, 21> rules{{
        {"ational", "ate", m_gt_0}, {"tional", "tion", m_gt_0}, {"enci", "ence", m_gt_0},
        {"anci", "ance", m_gt_0},   {"izer", "ize", m_gt_0},    {"bli", "ble", m_gt_0},
        {"alli", "al", m_gt_0},     {"entli", "ent", m_gt_0},   {"eli", "e", m_gt_0},
        {"ousli", "ous", m_gt_0},   {"ization", "ize", m_gt_0}, {"ation", "ate", m_gt_0},
        {"ator", "ate", m_gt_0},    {"alism", "al", m_gt_0},    {"iveness", "ive", m_gt_0},
        {"fulness", "ful", m_gt_0}, {"ousness", "ous", m_gt_0}, {"aliti", "al", m_gt_0},
        {"iviti", "ive", m_gt_0},   {"biliti", "ble", m_gt_0},  {"logi", "log", m_gt_0},
    }};
    return apply_rules(std::move(w), rules);
}

std::string porter_step3(std::string w) {
    static constexpr std::array<Rule, 7> rules{{
        {"icate", "ic", m_gt_0},
        {"ative", "", m_gt_0},
        {"alize", "al", m_gt_0},
        {"iciti", "ic", m_gt_0},
        {"ical", "ic", m_gt_0},
        {"ful", "", m_gt_0},
        {"ness", "", m_gt_0},
    }};
    return apply_rules(std::move(w), rules);
}

std::string porter_step4(std::string w) {
    static constexpr std::array<Rule, 19> rules{{
        {"al", "", m_gt_1},   {"ance", "", m_gt_1}, {"ence", "", m_gt_1},  {"er", "", m_gt_1},
        {"ic", "", m_gt_1},   {"able", "", m_gt_1}, {"ible", "", m_gt_1},  {"ant", "", m_gt_1},
        {"ement", "", m_gt_1}, {"ment", "", m_gt_1}, {"ent", "", m_gt_1},  {"ion", "", ion_condition},
        {"ou", "", m_gt_1},   {"ism", "", m_gt_1},  {"ate", "", m_gt_1},   {"iti", "", m_gt_1},
        {"ous", "", m_gt_1},  {"ive", "", m_gt_1},  {"ize", "", m_gt_1},
    }};
    return apply_rules(std::move(w), rules);
}

std::string porter_step5a(std::string w) {
    if (!ends_with(w, "e")) return w;
    const std::string_view stem = drop(w, 1);
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) return std::string(stem);
    return w;
}

std::string porter_step5b(std::string w) {
    if (ends_with(w, "ll") && measure(drop(w, 1)) > 1) w.pop_back();
    return w;
}

// ---------------------------------------------------------------------------
// Snowball English. R1/R2 are tracked as strings exactly like the reference
// implementation this was checked against, including its handling of
// regions that shrink below a replaced suffix.

constexpr std::string_view kSnowballVowels = "aeiouy";

bool sb_vowel(char c) { return kSnowballVowels.find(c) != std::string_view::npos; }

std::string sb_drop(const std::string& s, std::size_t n) { return std::string(drop(s, n)); }

std::string sb_replace(const std::string& s, std::string_view suffix, std::string_view rep) {
    return std::string(drop(s, suffix.size())) + std::string(rep);
}

std::pair<std::string, std::string> sb_regions(const std::string& w) {
    std::string r1, r2;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (!sb_vowel(w[i]) && sb_vowel(w[i - 1])) {
            r1 = w.substr(i + 1);
            break;
        }
    }
    for (std::size_t i = 1; i < r1.size(); ++i) {
        if (!sb_vowel(r1[i]) && sb_vowel(r1[i - 1])) {
            r2 = r1.substr(i + 1);
            break;
        }
    }
    return {r1, r2};
}

struct SpecialWord {
    std::string_view word;
    std::string_view stem;
};

constexpr std::array<SpecialWord, 40> kSpecialWords{{
    {"skis", "ski"},         {"skies", "sky"},          {"dying", "die"},
    {"lying", "lie"},        {"tying", "tie"},          {"idly", "idl"},
    {"gently", "gentl"},     {"ugly", "ugli"},          {"early", "earli"},
    {"only", "onli"},        {"singly", "singl"},       {"sky", "sky"},
    {"news", "news"},        {"howe", "howe"},          {"atlas", "atlas"},
    {"cosmos", "cosmos"},    {"bias", "bias"},          {"andes", "andes"},
    {"inning", "inning"},    {"innings", "inning"},     {"outing", "outing"},
    {"outings", "outing"},   {"canning", "canning"},    {"cannings", "canning"},
    {"herring", "herring"},  {"herrings", "herring"},   {"earring", "earring"},
    {"earrings", "earring"}, {"proceed", "proceed"},    {"proceeds", "proceed"},
    {"proceeded", "proceed"}, {"proceeding", "proceed"}, {"exceed", "exceed"},
    {"exceeds", "exceed"},   {"exceeded", "exceed"},    {"exceeding", "exceed"},
    {"succeed", "succeed"},  {"succeeds", "succeed"},   {"succeeded", "succeed"},
    {"succeeding", "succeed"},
}};

// Replace `suffix` by `rep` in word and in each region that fully contains
// the suffix; a region shorter than the suffix becomes `short_region`.
void sb_replace_all(std::string& w, std::string& r1, std::string& r2, std::string_view suffix,
                    std::string_view rep, std::string_view r2_short = "") {
    w = sb_replace(w, suffix, rep);
    r1 = r1.size() >= suffix.size() ? sb_replace(r1, suffix, rep) : std::string{};
    r2 = r2.size() >= suffix.size() ? sb_replace(r2, suffix, rep) : std::string(r2_short);
}

void sb_drop_all(std::string& w, std::string& r1, std::string& r2, std::size_t n) {
    w = sb_drop(w, n);
    r1 = sb_drop(r1, n);
    r2 = sb_drop(r2, n);
}

}  // namespace

std::string porter_stem(std::string_view word) {
    std::string w(word);
    if (w.size() <= 2) return w;
    w = porter_step1a(std::move(w));
    w = porter_step1b(std::move(w));
    w = porter_step1c(std::move(w));
    w = porter_step2(std::move(w));
    w = porter_step3(std::move(w));
    w = porter_step4(std::move(w));
    w = porter_step5a(std::move(w));
    w = porter_step5b(std::move(w));
    return w;
}

std::string snowball_stem(std::string_view word) {
    std::string w(word);
    if (w.size() <= 2) return w;
    for (const auto& s : kSpecialWords)
        if (s.word == w) return std::string(s.stem);

    if (w.front() == '\'') w.erase(0, 1);
    if (!w.empty() && w.front() == 'y') w.front() = 'Y';
    for (std::size_t i = 1; i < w.size(); ++i)
        if (sb_vowel(w[i - 1]) && w[i] == 'y') w[i] = 'Y';

    std::string r1, r2;
    if (w.starts_with("gener") || w.starts_with("commun") || w.starts_with("arsen")) {
        r1 = w.starts_with("commun") ? w.substr(6) : w.substr(5);
        for (std::size_t i = 1; i < r1.size(); ++i) {
            if (!sb_vowel(r1[i]) && sb_vowel(r1[i - 1])) {
                r2 = r1.substr(i + 1);
                break;
            }
        }
    } else {
        std::tie(r1, r2) = sb_regions(w);
    }

    // Step 0
    for (std::string_view suffix : {"'s'", "'s", "'"}) {
        if (ends_with(w, suffix)) {
            sb_drop_all(w, r1, r2, suffix.size());
            break;
        }
    }

    // Step 1a
    for (std::string_view suffix : {"sses", "ied", "ies", "us", "ss", "s"}) {
        if (!ends_with(w, suffix)) continue;
        if (suffix == "sses") {
            sb_drop_all(w, r1, r2, 2);
        } else if (suffix == "ied" || suffix == "ies") {
            sb_drop_all(w, r1, r2, w.size() - suffix.size() > 1 ? 2 : 1);
        } else if (suffix == "s") {
            bool vowel_found = false;
            for (char c : std::string_view(w).substr(0, w.size() >= 2 ? w.size() - 2 : 0))
                if (sb_vowel(c)) vowel_found = true;
            if (vowel_found) sb_drop_all(w, r1, r2, 1);
        }
        break;
    }

    // Step 1b
    for (std::string_view suffix : {"eedly", "ingly", "edly", "eed", "ing", "ed"}) {
        if (!ends_with(w, suffix)) continue;
        if (suffix == "eed" || suffix == "eedly") {
            if (ends_with(r1, suffix)) sb_replace_all(w, r1, r2, suffix, "ee");
        } else {
            bool vowel_found = false;
            for (char c : std::string_view(w).substr(0, w.size() - suffix.size()))
                if (sb_vowel(c)) vowel_found = true;
            if (vowel_found) {
                sb_drop_all(w, r1, r2, suffix.size());
                if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
                    w += 'e';
                    r1 += 'e';
                    if (w.size() > 5 || r1.size() >= 3) r2 += 'e';
                } else if (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] &&
                           std::string_view("bdfgmnprt").find(w.back()) != std::string_view::npos) {
                    sb_drop_all(w, r1, r2, 1);
                } else if ((r1.empty() && w.size() >= 3 && !sb_vowel(w[w.size() - 1]) &&
                            std::string_view("wxY").find(w.back()) == std::string_view::npos &&
                            sb_vowel(w[w.size() - 2]) && !sb_vowel(w[w.size() - 3])) ||
                           (r1.empty() && w.size() == 2 && sb_vowel(w[0]) && !sb_vowel(w[1]))) {
                    w += 'e';
                    if (!r1.empty()) r1 += 'e';
                    if (!r2.empty()) r2 += 'e';
                }
            }
        }
        break;
    }

    // Step 1c
    if (w.size() > 2 && (w.back() == 'y' || w.back() == 'Y') && !sb_vowel(w[w.size() - 2])) {
        w.back() = 'i';
        r1 = r1.empty() ? std::string{} : sb_drop(r1, 1) + "i";
        r2 = r2.empty() ? std::string{} : sb_drop(r2, 1) + "i";
    }

    // Step 2
    static constexpr std::array<std::string_view, 24> step2{
        "ization", "ational", "fulness", "ousness", "iveness", "tional", "biliti", "lessli",
        "entli",   "ation",   "alism",   "aliti",   "ousli",   "iviti",  "fulli",  "enci",
        "anci",    "abli",    "izer",    "ator",    "alli",    "bli",    "ogi",    "li"};
    for (std::string_view suffix : step2) {
        if (!ends_with(w, suffix)) continue;
        if (ends_with(r1, suffix)) {
            if (suffix == "tional" || suffix == "entli" || suffix == "fulli" || suffix == "lessli") {
                sb_drop_all(w, r1, r2, 2);
            } else if (suffix == "enci" || suffix == "anci" || suffix == "abli") {
                w = sb_drop(w, 1) + "e";
                r1 = r1.empty() ? std::string{} : sb_drop(r1, 1) + "e";
                r2 = r2.empty() ? std::string{} : sb_drop(r2, 1) + "e";
            } else if (suffix == "izer" || suffix == "ization") {
                sb_replace_all(w, r1, r2, suffix, "ize");
            } else if (suffix == "ational" || suffix == "ation" || suffix == "ator") {
                sb_replace_all(w, r1, r2, suffix, "ate", "e");
            } else if (suffix == "alism" || suffix == "aliti" || suffix == "alli") {
                sb_replace_all(w, r1, r2, suffix, "al");
            } else if (suffix == "fulness") {
                sb_drop_all(w, r1, r2, 4);
            } else if (suffix == "ousli" || suffix == "ousness") {
                sb_replace_all(w, r1, r2, suffix, "ous");
            } else if (suffix == "iveness" || suffix == "iviti") {
                sb_replace_all(w, r1, r2, suffix, "ive", "e");
            } else if (suffix == "biliti" || suffix == "bli") {
                sb_replace_all(w, r1, r2, suffix, "ble");
            } else if (suffix == "ogi" && w.size() >= 4 && w[w.size() - 4] == 'l') {
                sb_drop_all(w, r1, r2, 1);
            } else if (suffix == "li" && w.size() >= 3 &&
                       std::string_view("cdeghkmnrt").find(w[w.size() - 3]) != std::string_view::npos) {
                sb_drop_all(w, r1, r2, 2);
            }
        }
        break;
    }

    // Step 3
    static constexpr std::array<std::string_view, 9> step3{
        "ational", "tional", "alize", "icate", "iciti", "ative", "ical", "ness", "ful"};
    for (std::string_view suffix : step3) {
        if (!ends_with(w, suffix)) continue;
        if (ends_with(r1, suffix)) {
            if (suffix == "tional") {
                sb_drop_all(w, r1, r2, 2);
            } else if (suffix == "ational") {
                sb_replace_all(w, r1, r2, suffix, "ate");
            } else if (suffix == "alize") {
                sb_drop_all(w, r1, r2, 3);
            } else if (suffix == "icate" || suffix == "iciti" || suffix == "ical") {
                sb_replace_all(w, r1, r2, suffix, "ic");
            } else if (suffix == "ful" || suffix == "ness") {
                sb_drop_all(w, r1, r2, suffix.size());
            } else if (suffix == "ative" && ends_with(r2, suffix)) {
                sb_drop_all(w, r1, r2, 5);
            }
        }
        break;
    }

    // Step 4
    static constexpr std::array<std::string_view, 18> step4{
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
        "ate",   "iti",  "ous",  "ive",  "ize",  "ion",  "al",  "er",  "ic"};
    for (std::string_view suffix : step4) {
        if (!ends_with(w, suffix)) continue;
        if (ends_with(r2, suffix)) {
            if (suffix == "ion") {
                if (w.size() >= 4 && (w[w.size() - 4] == 's' || w[w.size() - 4] == 't'))
                    sb_drop_all(w, r1, r2, 3);
            } else {
                sb_drop_all(w, r1, r2, suffix.size());
            }
        }
        break;
    }

    // Step 5
    if (ends_with(r2, "l") && w.size() >= 2 && w[w.size() - 2] == 'l') {
        w.pop_back();
    } else if (ends_with(r2, "e")) {
        w.pop_back();
    } else if (ends_with(r1, "e")) {
        const std::size_t n = w.size();
        if (n >= 4 && (sb_vowel(w[n - 2]) || std::string_view("wxY").find(w[n - 2]) != std::string_view::npos ||
                       !sb_vowel(w[n - 3]) || sb_vowel(w[n - 4]))) {
            w.pop_back();
        }
    }

    for (char& c : w)
        if (c == 'Y') c = 'y';
    return w;
}

std::string normalize_stem(std::string_view word) {
    // Converges in a handful of steps on English vocabularies; the cap only
    // guards against a pathological cycle.
    constexpr int kMaxSteps = 16;
    std::string current(word);
    for (int step = 0; step < kMaxSteps; ++step) {
        std::string next = porter_stem(current);
        if (next == current) next = snowball_stem(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace textgraph::corpus
