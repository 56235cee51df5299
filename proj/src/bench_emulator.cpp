#include "csales/bench.hpp"

#include <algorithm>
#include <sstream>

#include "csales/dialogue.hpp"
#include "csales/prompts.hpp"
#include "csales/simulator.hpp"

#include <json.hpp>

namespace csales::bench {

namespace {

using dialogue::Conversation;
using dialogue::Speaker;
using dialogue::Strategy;
using nlohmann::json;

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream ss(text);
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

Conversation parse_conversation(const std::vector<std::string>& lines,
                                const std::string& marker) {
    Conversation conv;
    bool in_block = false;
    for (const auto& raw : lines) {
        std::string line = raw;
        if (!in_block) {
            const std::size_t pos = line.find(marker);
            if (pos == std::string::npos) continue;
            in_block = true;
            line = line.substr(pos + marker.size());
            if (trim(line).empty()) continue;
        }
        if (line.rfind("Seeker: ", 0) == 0)
            conv.push_back({Speaker::Seeker, line.substr(8)});
        else if (line.rfind("Recommender: ", 0) == 0)
            conv.push_back({Speaker::Recommender, line.substr(13)});
        else if (in_block)
            break;
    }
    return conv;
}

std::optional<json> parse_profile_json(const std::vector<std::string>& lines) {
    const std::string marker = "Here is Seeker's Current Profile: ";
    for (const auto& line : lines) {
        const std::size_t pos = line.find(marker);
        if (pos == std::string::npos) continue;
        json j = json::parse(line.substr(pos + marker.size()), nullptr, false);
        if (!j.is_discarded()) return j;
    }
    return std::nullopt;
}

// ---- dialogue state the responder reconstructs every call ----

struct SeekerSignals {
    std::vector<std::string> keywords;  // in reveal order
    bool needs_complete = false;
    std::optional<std::pair<double, double>> range;
    std::vector<std::string> path;
    std::optional<std::string> selected_id;
    std::string style_word;  // "Rational" | "Dependent" | "Intuitive" | ""
};

void add_keyword(SeekerSignals& s, const std::string& kw) {
    const std::string t = trim(kw);
    if (t.empty()) return;
    if (std::find(s.keywords.begin(), s.keywords.end(), t) == s.keywords.end())
        s.keywords.push_back(t);
}

SeekerSignals read_seeker_signals(const Conversation& conv) {
    SeekerSignals s;
    for (const auto& u : conv) {
        if (u.speaker != Speaker::Seeker) continue;
        const std::string& text = u.text;

        if (auto range = dialogue::parse_price_range(text)) s.range = range;

        static const std::string kOpeningMarker = "I want to find something ";
        const std::size_t want = text.find(kOpeningMarker);
        if (want != std::string::npos) {
            const std::size_t start = want + kOpeningMarker.size();
            const std::size_t dot = text.find('.', start);
            if (dot != std::string::npos) add_keyword(s, text.substr(start, dot - start));
        }
        const std::size_t care = text.find(simulator::kRevealPrefix);
        if (care != std::string::npos) {
            const std::size_t start = care + std::string(simulator::kRevealPrefix).size();
            const std::size_t dot = text.find('.', start);
            if (dot != std::string::npos) {
                std::istringstream list(text.substr(start, dot - start));
                std::string kw;
                while (std::getline(list, kw, ',')) add_keyword(s, kw);
            }
        }
        if (text.find(simulator::kNeedsCompleteMarker) != std::string::npos)
            s.needs_complete = true;

        const std::size_t need = text.find("I need ");
        if (need != std::string::npos) {
            const std::size_t end = text.find(" products", need);
            if (end != std::string::npos) {
                std::vector<std::string> segments;
                std::istringstream ss(text.substr(need + 7, end - need - 7));
                std::string seg;
                while (std::getline(ss, seg, '>'))
                    if (!trim(seg).empty()) segments.push_back(trim(seg));
                if (!segments.empty()) s.path = segments;
            }
        }

        const auto mentions = dialogue::parse_item_mentions(text);
        if (!mentions.empty()) s.selected_id = mentions.back().id;

        if (text.find("concrete facts and logical comparisons") != std::string::npos)
            s.style_word = "Rational";
        else if (text.find("what other buyers say") != std::string::npos)
            s.style_word = "Dependent";
        else if (text.find("how a product makes me feel") != std::string::npos)
            s.style_word = "Intuitive";
    }
    return s;
}

std::string personality_text(const std::string& style_word) {
    if (style_word == "Rational")
        return "Rational: convinced by concrete facts and logical comparisons";
    if (style_word == "Dependent")
        return "Dependent: follows other buyers' ratings and reviews";
    if (style_word == "Intuitive") return "Intuitive: goes with how a product feels";
    return "";
}

// ---- template responders ----

std::string respond_action_planning(const std::vector<std::string>& lines) {
    const Conversation conv = parse_conversation(lines, "Here is Conversation History: ");
    const SeekerSignals sig = read_seeker_signals(conv);
    const auto prev = parse_profile_json(lines);

    std::string personality = personality_text(sig.style_word);
    if (personality.empty() && prev && prev->contains("Personality") &&
        (*prev)["Personality"].is_string())
        personality = (*prev)["Personality"].get<std::string>();

    std::string selected;
    if (sig.selected_id)
        selected = *sig.selected_id;
    else if (prev && prev->contains("Selected Item ID") &&
             (*prev)["Selected Item ID"].is_string())
        selected = (*prev)["Selected Item ID"].get<std::string>();

    std::string preference;
    for (std::size_t i = 0; i < sig.keywords.size(); ++i) {
        if (i) preference += " ";
        preference += sig.keywords[i];
    }

    std::string action;
    std::string thought;
    if (!sig.needs_complete) {
        action = "Preference Probing";
        thought = "The stated needs look incomplete; keep eliciting preferences.";
    } else if (sig.path.empty()) {
        action = "Category Search";
        thought = "Needs are clear but the category path is unknown; narrow it down.";
    } else if (selected.empty()) {
        action = "Suggestion";
        thought = "Profile and category are set; recommend matching items.";
    } else {
        action = "Persuasion";
        thought = "The seeker showed interest in a specific item; argue for the stronger "
                  "alternative.";
    }

    json range = json::array();
    if (sig.range) {
        range.push_back(sig.range->first);
        range.push_back(sig.range->second);
    } else {
        range.push_back(0);
        range.push_back(nullptr);
    }

    json reply = {{"Thoughts", thought},
                  {"Profile",
                   {{"Preference", preference},
                    {"Category Path", sig.path},
                    {"Personality", personality},
                    {"Expected Price Range", range},
                    {"Selected Item ID", selected}}},
                  {"Action", action}};
    return reply.dump();
}

std::string respond_react_planning(const std::vector<std::string>& lines) {
    const Conversation conv = parse_conversation(lines, "Here is Conversation History: ");
    const SeekerSignals sig = read_seeker_signals(conv);

    int probes_done = 0;
    for (const auto& u : conv)
        if (u.speaker == Speaker::Recommender &&
            u.text.find("[Preference Probing]") != std::string::npos)
            ++probes_done;

    std::string action;
    std::string thought;
    if (probes_done < 1) {
        action = "Preference Probing";
        thought = "Ask once about preferences before recommending.";
    } else if (sig.path.empty()) {
        action = "Category Search";
        thought = "Pin down the category path from the conversation.";
    } else if (!sig.selected_id) {
        action = "Suggestion";
        thought = "Query the catalog with the conversation so far.";
    } else {
        action = "Persuasion";
        thought = "Push the premium alternative to the item the seeker mentioned.";
        if (!sig.style_word.empty())
            thought += " Seeker sounds " + sig.style_word + ".";
    }

    json range = json::array();
    if (sig.range) {
        range.push_back(sig.range->first);
        range.push_back(sig.range->second);
    } else {
        range.push_back(0);
        range.push_back(nullptr);
    }

    json reply = {{"Thoughts", thought},
                  {"Budget", range},
                  {"Category Path", sig.path},
                  {"Selected Item ID", sig.selected_id ? json(*sig.selected_id) : json("")},
                  {"Action", action}};
    return reply.dump();
}

std::string respond_preference_probe(const std::vector<std::string>& lines) {
    static const char* kAspects[] = {"material",  "style",    "color or pattern", "fit",
                                     "features",  "occasion", "texture",          "brand"};
    const Conversation conv = parse_conversation(lines, "Here is Conversation History: ");
    int asked = 0;
    for (const auto& u : conv)
        if (u.speaker == Speaker::Recommender &&
            u.text.find("[Preference Probing]") != std::string::npos)
            ++asked;
    const auto& aspect = kAspects[asked % (sizeof(kAspects) / sizeof(kAspects[0]))];
    return std::string("What do you prefer in terms of ") + aspect + " for this purchase?";
}

struct ItemSlot {
    std::string title;
    std::string id;
    double price = 0.0;
    std::string rating_text;
};

std::optional<ItemSlot> parse_item_slot(const std::vector<std::string>& lines,
                                        const std::string& marker) {
    for (const auto& line : lines) {
        const std::size_t pos = line.find(marker);
        if (pos == std::string::npos) continue;
        const std::string body = line.substr(pos + marker.size());
        const auto mentions = dialogue::parse_item_mentions(body);
        if (mentions.empty()) continue;
        ItemSlot slot;
        slot.title = mentions.front().title;
        slot.id = mentions.front().id;
        const auto prices = dialogue::parse_prices(body);
        if (!prices.empty()) slot.price = prices.front();
        const std::size_t rating = body.find("average rating ");
        if (rating != std::string::npos) {
            const std::size_t stop = body.find(" reviews", rating);
            if (stop != std::string::npos)
                slot.rating_text = body.substr(rating, stop - rating + 8);
        }
        return slot;
    }
    return std::nullopt;
}

std::string slot_value(const std::vector<std::string>& lines, const std::string& marker) {
    for (const auto& line : lines) {
        const std::size_t pos = line.find(marker);
        if (pos != std::string::npos) return trim(line.substr(pos + marker.size()));
    }
    return "";
}

std::string respond_persuasion(const std::vector<std::string>& lines,
                               const gateway::CompletionParams& params) {
    const Conversation conv =
        parse_conversation(lines, "Here is your Conversation History: ");
    const std::string personality = slot_value(lines, "User Personality: ");
    const std::string thoughts = slot_value(lines, "current state analysis: ");
    const auto selected = parse_item_slot(lines, "<Selected Item> : ");
    const auto candidate = parse_item_slot(lines, "<Candidate Item> : ");

    std::vector<Strategy> exemplars;
    for (const auto& line : lines) {
        const std::string t = trim(line);
        if (t.rfind("- [", 0) != 0) continue;
        const std::size_t close = t.find(']');
        if (close == std::string::npos) continue;
        if (auto strat = dialogue::parse_strategy(t.substr(3, close - 3)))
            exemplars.push_back(*strat);
    }

    const std::string context = personality + " " + thoughts;
    std::optional<Strategy> choice;
    if (context.find("Rational") != std::string::npos)
        choice = Strategy::LogicalAppeal;
    else if (context.find("Dependent") != std::string::npos)
        choice = Strategy::SocialProof;
    else if (context.find("Intuitive") != std::string::npos)
        choice = Strategy::EmotionalAppeal;
    else if (!exemplars.empty())
        choice = exemplars.front();  // nearest recorded success

    if (!choice) {
        // no signal yet: deterministic first guess, spread across dialogues
        int prior = 0;
        for (const auto& u : conv) {
            if (u.speaker != Speaker::Recommender) continue;
            const auto segments = dialogue::parse_tagged_segments(u.text);
            for (const auto& seg : segments)
                if (seg.strategy) ++prior;
        }
        choice = blind_strategy_guess(params.key.dialogue_id, prior);
    }

    std::ostringstream sentence;
    const std::string sel_text =
        selected ? dialogue::render_item_mention(selected->title, selected->id) + " at " +
                       format_price(selected->price)
                 : "the option you mentioned";
    const std::string cand_text =
        candidate ? dialogue::render_item_mention(candidate->title, candidate->id) + " at " +
                        format_price(candidate->price)
                  : "the premium option";
    switch (*choice) {
        case Strategy::LogicalAppeal:
            sentence << "While " << sel_text << " is a reasonable pick, " << cand_text
                     << " lines up point by point with what you said you need, so the "
                        "difference buys real coverage.";
            break;
        case Strategy::SocialProof:
            sentence << "Compared with " << sel_text << ", " << cand_text << " has an "
                     << (candidate && !candidate->rating_text.empty()
                             ? candidate->rating_text
                             : std::string("excellent rating from other buyers"))
                     << ", and buyers consistently recommend it.";
            break;
        case Strategy::EmotionalAppeal:
            sentence << sel_text << " would do the job, but imagine how satisfying "
                     << cand_text << " will feel every single day; it is the choice "
                        "you'll be happy about.";
            break;
        case Strategy::EvidenceBased:
            sentence << "The specifications show " << cand_text << " covers more of your "
                        "requirements than " << sel_text << ", which the data clearly favors.";
            break;
        case Strategy::Framing:
            sentence << "Unlike " << sel_text << ", " << cand_text
                     << " stands apart exactly where it matters for you.";
            break;
    }

    const char* label = "Logical Appeal";
    switch (*choice) {
        case Strategy::LogicalAppeal: label = "Logical Appeal"; break;
        case Strategy::SocialProof: label = "Social Proof"; break;
        case Strategy::EmotionalAppeal: label = "Emotional Appeal"; break;
        case Strategy::EvidenceBased: label = "Evidence-Based Approach"; break;
        case Strategy::Framing: label = "Framing"; break;
    }
    json reply = {{"strategy", label}, {"sentence", sentence.str()}};
    return reply.dump();
}

}  // namespace

dialogue::Strategy blind_strategy_guess(const std::string& dialogue_id, int prior_attempts) {
    static const Strategy kGuesses[] = {Strategy::LogicalAppeal, Strategy::SocialProof,
                                        Strategy::EmotionalAppeal, Strategy::EvidenceBased};
    // splitmix pass: raw fnv low bits are too regular under small id edits
    std::uint64_t state = fnv1a64(dialogue_id);
    const std::uint64_t mixed = splitmix64(state);
    return kGuesses[(mixed + static_cast<std::uint64_t>(prior_attempts)) % 4];
}

gateway::RecordingBackend::Responder make_emulated_responder() {
    return [](const std::vector<gateway::ChatMessage>& messages,
              const gateway::CompletionParams& params, int) -> std::string {
        if (messages.empty()) throw GatewayError("emulated responder got no messages");
        const auto lines = split_lines(messages.back().content);
        const std::string& tid = params.key.template_id;
        if (tid == prompts::kActionPlanning) return respond_action_planning(lines);
        if (tid == prompts::kReactPlanning) return respond_react_planning(lines);
        if (tid == prompts::kPreferenceProbe) return respond_preference_probe(lines);
        if (tid == prompts::kPersuasion) return respond_persuasion(lines, params);
        throw GatewayError("emulated responder has no script for template " + tid);
    };
}

}  // namespace csales::bench
