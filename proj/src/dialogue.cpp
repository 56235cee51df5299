#include "csales/dialogue.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace csales::dialogue {

std::string render(const Conversation& conversation) {
    std::ostringstream out;
    for (const auto& u : conversation)
        out << (u.speaker == Speaker::Seeker ? "Seeker: " : "Recommender: ") << u.text << "\n";
    return out.str();
}

std::string action_label(Action a) {
    switch (a) {
        case Action::PreferenceProbing: return "Preference Probing";
        case Action::CategoryNarrowing: return "Category Narrowing";
        case Action::ItemSuggestion: return "Suggestion";
        case Action::Persuasion: return "Persuasion";
    }
    return "Preference Probing";
}

std::string strategy_label(Strategy s) {
    switch (s) {
        case Strategy::Framing: return "Framing";
        case Strategy::LogicalAppeal: return "Logical Appeal";
        case Strategy::EmotionalAppeal: return "Emotional Appeal";
        case Strategy::EvidenceBased: return "Evidence-Based";
        case Strategy::SocialProof: return "Social Proof";
    }
    return "Logical Appeal";
}

namespace {

std::string normalize_label(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::optional<Action> parse_action(const std::string& label) {
    const std::string t = normalize_label(label);
    if (t == "preferenceprobing") return Action::PreferenceProbing;
    if (t == "categorynarrowing" || t == "categorysearch") return Action::CategoryNarrowing;
    if (t == "suggestion" || t == "itemsuggestion") return Action::ItemSuggestion;
    if (t == "persuasion") return Action::Persuasion;
    return std::nullopt;
}

std::optional<Strategy> parse_strategy(const std::string& label) {
    const std::string t = normalize_label(label);
    if (t == "framing") return Strategy::Framing;
    if (t == "logicalappeal") return Strategy::LogicalAppeal;
    if (t == "emotionalappeal") return Strategy::EmotionalAppeal;
    if (t == "evidencebased" || t == "evidencebasedapproach") return Strategy::EvidenceBased;
    if (t == "socialproof") return Strategy::SocialProof;
    return std::nullopt;
}

std::vector<ItemMention> parse_item_mentions(const std::string& text) {
    std::vector<ItemMention> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t open = text.find("<\"", pos);
        if (open == std::string::npos) break;
        const std::size_t close = text.find("\">", open + 2);
        if (close == std::string::npos) break;
        std::size_t cursor = close + 2;
        while (cursor < text.size() && text[cursor] == ' ') ++cursor;
        if (cursor >= text.size() || text[cursor] != '(') {
            pos = close + 2;
            continue;
        }
        const std::size_t id_end = text.find(')', cursor + 1);
        if (id_end == std::string::npos) break;
        std::string id = trim(text.substr(cursor + 1, id_end - cursor - 1));
        // ids are plain alphanumeric tokens; anything else is prose in parens
        const bool id_ok =
            !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
                return std::isalnum(c) || c == '_' || c == '-';
            });
        if (id_ok)
            out.push_back({text.substr(open + 2, close - open - 2), std::move(id)});
        pos = id_end + 1;
    }
    return out;
}

namespace {

std::optional<double> parse_amount(const std::string& text, std::size_t& pos) {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '$'))
        ++pos;
    const std::size_t start = pos;
    while (pos < text.size()) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            ++pos;
        } else if (c == ',' && pos + 1 < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            ++pos;  // thousands separator, as in 5,875
        } else {
            break;
        }
    }
    if (pos == start) return std::nullopt;
    std::string digits;
    for (std::size_t i = start; i < pos; ++i)
        if (text[i] != ',') digits.push_back(text[i]);
    char* end = nullptr;
    const double value = std::strtod(digits.c_str(), &end);
    if (end == digits.c_str()) return std::nullopt;
    return value;
}

}  // namespace

std::optional<std::pair<double, double>> parse_price_range(const std::string& text) {
    std::size_t pos = 0;
    while ((pos = text.find('[', pos)) != std::string::npos) {
        std::size_t cursor = pos + 1;
        auto lo = parse_amount(text, cursor);
        if (lo && cursor < text.size() && text[cursor] == ',') {
            ++cursor;
            auto hi = parse_amount(text, cursor);
            if (hi && cursor < text.size() && text[cursor] == ']') return {{*lo, *hi}};
        }
        ++pos;
    }
    return std::nullopt;
}

std::vector<double> parse_prices(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while ((pos = text.find('$', pos)) != std::string::npos) {
        std::size_t cursor = pos;
        auto value = parse_amount(text, cursor);
        if (value) out.push_back(*value);
        pos = cursor > pos ? cursor : pos + 1;
    }
    return out;
}

std::vector<TaggedSegment> parse_tagged_segments(const std::string& utterance) {
    struct Tag {
        std::size_t start;  // position of '['
        std::size_t end;    // position after ']'
        TaggedSegment seg;
    };
    std::vector<Tag> tags;
    std::size_t pos = 0;
    while ((pos = utterance.find('[', pos)) != std::string::npos) {
        const std::size_t close = utterance.find(']', pos + 1);
        if (close == std::string::npos) break;
        const std::string label = utterance.substr(pos + 1, close - pos - 1);
        TaggedSegment seg;
        if (auto strat = parse_strategy(label)) {
            seg.strategy = strat;
            seg.action = Action::Persuasion;
            tags.push_back({pos, close + 1, seg});
        } else if (auto act = parse_action(label)) {
            seg.action = act;
            tags.push_back({pos, close + 1, seg});
        }
        pos = close + 1;
    }
    std::vector<TaggedSegment> out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const std::size_t body_end =
            (i + 1 < tags.size()) ? tags[i + 1].start : utterance.size();
        tags[i].seg.text = trim(utterance.substr(tags[i].end, body_end - tags[i].end));
        out.push_back(std::move(tags[i].seg));
    }
    return out;
}

std::string render_item_mention(const std::string& title, const std::string& id) {
    return "<\"" + title + "\"> (" + id + ")";
}

}  // namespace csales::dialogue
