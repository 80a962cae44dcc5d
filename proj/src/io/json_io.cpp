#include "mpgm/io/json_io.hpp"

#include "mpgm/core/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpgm::io {

using nlohmann::json;

namespace {

slam::Heading heading_from_string(const std::string& s) {
    if (s == "N") return slam::Heading::North;
    if (s == "E") return slam::Heading::East;
    if (s == "S") return slam::Heading::South;
    if (s == "W") return slam::Heading::West;
    throw std::runtime_error("bad heading '" + s + "' (expected N/E/S/W)");
}

std::string heading_to_string(slam::Heading h) {
    switch (h) {
        case slam::Heading::North: return "N";
        case slam::Heading::East: return "E";
        case slam::Heading::South: return "S";
        case slam::Heading::West: return "W";
    }
    throw std::logic_error("unreachable");
}

slam::Pose pose_from_json(const json& j) {
    return {j.at("x").get<int>(), j.at("y").get<int>(),
            heading_from_string(j.at("heading").get<std::string>())};
}

json pose_to_json(const slam::Pose& p) {
    return {{"x", p.x}, {"y", p.y}, {"heading", heading_to_string(p.heading)}};
}

slam::MoveAction action_from_string(const std::string& s) {
    if (s == "forward") return slam::MoveAction::Forward;
    if (s == "turn_left") return slam::MoveAction::TurnLeft;
    if (s == "turn_right") return slam::MoveAction::TurnRight;
    throw std::runtime_error("bad action '" + s + "'");
}

std::string action_to_string(slam::MoveAction a) {
    switch (a) {
        case slam::MoveAction::Forward: return "forward";
        case slam::MoveAction::TurnLeft: return "turn_left";
        case slam::MoveAction::TurnRight: return "turn_right";
    }
    throw std::logic_error("unreachable");
}

json world_to_json_obj(const slam::GridWorld& world) {
    json occupied = json::array();
    for (int y = 1; y + 1 < world.height; ++y)
        for (int x = 1; x + 1 < world.width; ++x)
            if (world.occupied_at(x, y)) occupied.push_back({x, y});
    return {{"width", world.width},
            {"height", world.height},
            {"occupied", occupied},
            {"start", pose_to_json(world.start)}};
}

slam::GridWorld world_from_json_obj(const json& j) {
    std::vector<std::pair<int, int>> occupied;
    for (const auto& cell : j.at("occupied"))
        occupied.emplace_back(cell.at(0).get<int>(), cell.at(1).get<int>());
    return slam::GridWorld(j.at("width").get<int>(), j.at("height").get<int>(), occupied,
                           pose_from_json(j.at("start")));
}

}  // namespace

slam::GridWorld world_from_json(const std::string& text) {
    return world_from_json_obj(json::parse(text));
}

std::string world_to_json(const slam::GridWorld& world) {
    return world_to_json_obj(world).dump(2);
}

planning::TabularMdp mdp_from_json(const std::string& text) {
    const json j = json::parse(text);
    const int s = j.at("S").get<int>();
    const int a = j.at("A").get<int>();
    std::vector<Eigen::MatrixXd> trans;
    const auto& jt = j.at("transition");
    for (int ai = 0; ai < a; ++ai) {
        Eigen::MatrixXd m(s, s);
        for (int si = 0; si < s; ++si)
            for (int sj = 0; sj < s; ++sj) m(si, sj) = jt.at(ai).at(si).at(sj).get<double>();
        trans.push_back(std::move(m));
    }
    Eigen::MatrixXd reward(s, a);
    for (int si = 0; si < s; ++si)
        for (int ai = 0; ai < a; ++ai) reward(si, ai) = j.at("reward").at(si).at(ai).get<double>();
    std::optional<int> horizon;
    std::optional<double> gamma;
    if (j.contains("horizon")) horizon = j.at("horizon").get<int>();
    if (j.contains("gamma")) gamma = j.at("gamma").get<double>();
    std::vector<double> initial;
    if (j.contains("initial")) initial = j.at("initial").get<std::vector<double>>();
    return planning::TabularMdp(s, a, std::move(trans), std::move(reward), horizon, gamma,
                                j.at("alpha").get<double>(), std::move(initial));
}

std::string mdp_to_json(const planning::TabularMdp& mdp) {
    json j;
    j["S"] = mdp.n_states;
    j["A"] = mdp.n_actions;
    json jt = json::array();
    for (const auto& m : mdp.transition) {
        json rows = json::array();
        for (int s = 0; s < mdp.n_states; ++s) {
            json row = json::array();
            for (int t = 0; t < mdp.n_states; ++t) row.push_back(m(s, t));
            rows.push_back(std::move(row));
        }
        jt.push_back(std::move(rows));
    }
    j["transition"] = std::move(jt);
    json jr = json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        json row = json::array();
        for (int a = 0; a < mdp.n_actions; ++a) row.push_back(mdp.reward(s, a));
        jr.push_back(std::move(row));
    }
    j["reward"] = std::move(jr);
    j["alpha"] = mdp.temperature;
    if (mdp.horizon) j["horizon"] = *mdp.horizon;
    if (mdp.gamma) j["gamma"] = *mdp.gamma;
    j["initial"] = mdp.initial;
    return j.dump(2);
}

planning::TabularPomdp pomdp_from_json(const std::string& text) {
    const json j = json::parse(text);
    planning::TabularMdp core = mdp_from_json(text);
    const int o = j.at("O").get<int>();
    Eigen::MatrixXd obs(core.n_states, o);
    for (int s = 0; s < core.n_states; ++s)
        for (int oi = 0; oi < o; ++oi) obs(s, oi) = j.at("obs_model").at(s).at(oi).get<double>();
    CategoricalDist pref(j.at("preference").get<std::vector<double>>());
    return planning::TabularPomdp(std::move(core), std::move(obs), std::move(pref));
}

std::string pomdp_to_json(const planning::TabularPomdp& pomdp) {
    json j = json::parse(mdp_to_json(pomdp.core));
    j["O"] = pomdp.n_observations;
    json jo = json::array();
    for (int s = 0; s < pomdp.core.n_states; ++s) {
        json row = json::array();
        for (int o = 0; o < pomdp.n_observations; ++o) row.push_back(pomdp.obs_model(s, o));
        jo.push_back(std::move(row));
    }
    j["obs_model"] = std::move(jo);
    j["preference"] = pomdp.preference.probs();
    return j.dump(2);
}

compositions::LabeledCorpus corpus_from_jsonl(const std::string& text,
                                              const std::vector<std::string>& modality_names) {
    compositions::LabeledCorpus out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        mixture::MldaObject obj;
        obj.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        const auto& mods = j.at("modalities");
        for (const auto& name : modality_names) {
            if (mods.contains(name))
                obj.tokens.push_back(mods.at(name).get<std::vector<int>>());
            else
                obj.tokens.push_back({});
        }
        out.corpus.push_back(std::move(obj));
        out.truth.push_back(j.value("category", -1));
    }
    return out;
}

std::string corpus_to_jsonl(const compositions::LabeledCorpus& corpus,
                            const std::vector<std::string>& modality_names) {
    std::ostringstream out;
    for (std::size_t i = 0; i < corpus.corpus.size(); ++i) {
        const auto& obj = corpus.corpus[i];
        json mods;
        for (std::size_t m = 0; m < modality_names.size() && m < obj.tokens.size(); ++m)
            mods[modality_names[m]] = obj.tokens[m];
        json j{{"id", obj.id}, {"modalities", mods}};
        if (i < corpus.truth.size() && corpus.truth[i] >= 0) j["category"] = corpus.truth[i];
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<std::vector<int>> sequences_from_jsonl(const std::string& text) {
    std::vector<std::vector<int>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(json::parse(line).at("obs").get<std::vector<int>>());
    }
    return out;
}

std::string sequences_to_jsonl(const std::vector<std::vector<int>>& sequences,
                               const std::vector<std::string>& ids) {
    std::ostringstream out;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        json j{{"id", i < ids.size() ? ids[i] : "seq" + std::to_string(i)}, {"obs", sequences[i]}};
        out << j.dump() << "\n";
    }
    return out.str();
}

compositions::SpcoScenario spco_scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    compositions::SpcoScenario sc{world_from_json_obj(j.at("world")),
                                  j.at("eps_move").get<double>(),
                                  j.at("eps_sense").get<double>(),
                                  {},
                                  {},
                                  {},
                                  {},
                                  j.at("vocab_size").get<int>(),
                                  {},
                                  {},
                                  j.at("seed").get<std::uint64_t>()};
    int step = 0;
    for (const auto& js : j.at("steps")) {
        sc.actions.push_back(action_from_string(js.at("action").get<std::string>()));
        slam::RangeObservation obs;
        for (int d = 0; d < 4; ++d) obs.ranges[static_cast<std::size_t>(d)] = js.at("observation").at(d).get<int>();
        sc.observations.push_back(obs);
        sc.true_poses.push_back(pose_from_json(js.at("true_pose")));
        if (js.contains("words")) sc.utterances[step] = js.at("words").get<std::vector<int>>();
        ++step;
    }
    if (j.contains("room_of_cell")) sc.room_of_cell = j.at("room_of_cell").get<std::vector<int>>();
    if (j.contains("room_word")) sc.room_word = j.at("room_word").get<std::vector<int>>();
    return sc;
}

std::string spco_scenario_to_json(const compositions::SpcoScenario& sc) {
    json j;
    j["world"] = world_to_json_obj(sc.world);
    j["eps_move"] = sc.eps_move;
    j["eps_sense"] = sc.eps_sense;
    j["vocab_size"] = sc.vocab_size;
    j["seed"] = sc.seed;
    json steps = json::array();
    for (std::size_t t = 0; t < sc.actions.size(); ++t) {
        json js{{"action", action_to_string(sc.actions[t])},
                {"observation", sc.observations[t].ranges},
                {"true_pose", pose_to_json(sc.true_poses[t])}};
        auto it = sc.utterances.find(static_cast<int>(t));
        if (it != sc.utterances.end()) js["words"] = it->second;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    if (!sc.room_of_cell.empty()) j["room_of_cell"] = sc.room_of_cell;
    if (!sc.room_word.empty()) j["room_word"] = sc.room_word;
    return j.dump(2);
}

compositions::ProtoScenario proto_scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    compositions::ProtoScenario sc{world_from_json_obj(j.at("world")),
                                   j.at("profile_of_cell").get<std::vector<int>>(),
                                   {},
                                   {},
                                   j.at("vision_vocab").get<int>(),
                                   j.at("audio_vocab").get<int>(),
                                   {},
                                   {},
                                   j.at("episodes").get<int>(),
                                   j.at("episode_length").get<int>(),
                                   j.at("seed").get<std::uint64_t>()};
    for (const auto& p : j.at("profile_vision")) sc.profile_vision.push_back(p.get<std::vector<int>>());
    for (const auto& p : j.at("profile_audio")) sc.profile_audio.push_back(p.get<std::vector<int>>());
    for (const auto& c : j.at("reward_cells"))
        sc.reward_cells.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    if (j.contains("room_of_cell")) sc.room_of_cell = j.at("room_of_cell").get<std::vector<int>>();
    return sc;
}

std::string proto_scenario_to_json(const compositions::ProtoScenario& sc) {
    json j;
    j["world"] = world_to_json_obj(sc.world);
    j["profile_of_cell"] = sc.profile_of_cell;
    j["profile_vision"] = sc.profile_vision;
    j["profile_audio"] = sc.profile_audio;
    j["vision_vocab"] = sc.vision_vocab;
    j["audio_vocab"] = sc.audio_vocab;
    json rc = json::array();
    for (const auto& [x, y] : sc.reward_cells) rc.push_back({x, y});
    j["reward_cells"] = std::move(rc);
    if (!sc.room_of_cell.empty()) j["room_of_cell"] = sc.room_of_cell;
    j["episodes"] = sc.episodes;
    j["episode_length"] = sc.episode_length;
    j["seed"] = sc.seed;
    return j.dump(2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string content_hash(const std::string& bytes) {
    const std::uint64_t h = RngStream::fnv1a(bytes);
    std::ostringstream ss;
    ss << std::hex << h;
    return ss.str();
}

}  // namespace mpgm::io
