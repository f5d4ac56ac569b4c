#include "actprompt/core/episode_io.hpp"

#include <fstream>
#include <json.hpp>

#include "actprompt/core/errors.hpp"

namespace actprompt {
namespace {

using nlohmann::json;

// Thrown while decoding one record; carries the path of the offending field.
struct FieldError {
    std::string field;
    std::string message;
    bool invariant = false;
};

json pose_to_json(const Pose6& p) { return json::array({p.x(), p.y(), p.z(), p.roll(), p.pitch(), p.yaw()}); }

const json& require(const json& obj, const char* key, const std::string& field) {
    if (!obj.is_object()) throw FieldError{field, "expected an object"};
    auto it = obj.find(key);
    if (it == obj.end()) throw FieldError{field + "." + key, "missing"};
    return *it;
}

const json& require_array(const json& value, const std::string& field) {
    if (!value.is_array()) throw FieldError{field, "expected an array"};
    return value;
}

double number_at(const json& value, const std::string& field) {
    if (!value.is_number()) throw FieldError{field, "expected a number"};
    return value.get<double>();
}

template <typename F>
auto guard_invariant(const std::string& field, F&& build) {
    try {
        return build();
    } catch (const ValidationError& e) {
        throw FieldError{field, e.what(), true};
    }
}

Pose6 pose_from_json(const json& value, const std::string& field) {
    require_array(value, field);
    if (value.size() != 6) throw FieldError{field, "pose length " + std::to_string(value.size()) + " ≠ 6"};
    double v[6];
    for (std::size_t i = 0; i < 6; ++i) v[i] = number_at(value[i], field + "[" + std::to_string(i) + "]");
    return guard_invariant(field, [&] { return Pose6(v[0], v[1], v[2], v[3], v[4], v[5]); });
}

Episode decode(const json& record) {
    const auto& instruction = require(record, "instruction", "record");
    if (!instruction.is_string()) throw FieldError{"instruction", "expected a string"};

    std::vector<ObjectObservation> objects;
    const auto& objs = require_array(require(record, "objects", "record"), "objects");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string field = "objects[" + std::to_string(i) + "]";
        const auto& name = require(objs[i], "name", field);
        if (!name.is_string()) throw FieldError{field + ".name", "expected a string"};
        Pose6 pose = pose_from_json(require(objs[i], "pose", field), field + ".pose");
        objects.push_back(guard_invariant(field, [&] { return ObjectObservation(name.get<std::string>(), pose); }));
    }

    std::vector<JointVelocities> velocities;
    const auto& vels = require_array(require(record, "velocities", "record"), "velocities");
    for (std::size_t i = 0; i < vels.size(); ++i) {
        const std::string field = "velocities[" + std::to_string(i) + "]";
        require_array(vels[i], field);
        std::vector<double> values;
        for (std::size_t j = 0; j < vels[i].size(); ++j) {
            values.push_back(number_at(vels[i][j], field + "[" + std::to_string(j) + "]"));
        }
        velocities.push_back(guard_invariant(field, [&] { return JointVelocities(values); }));
    }

    std::vector<Action> actions;
    const auto& acts = require_array(require(record, "actions", "record"), "actions");
    for (std::size_t i = 0; i < acts.size(); ++i) {
        const std::string field = "actions[" + std::to_string(i) + "]";
        Pose6 pose = pose_from_json(require(acts[i], "pose", field), field + ".pose");
        const auto& g = require(acts[i], "gripper", field);
        if (!g.is_number_integer()) throw FieldError{field + ".gripper", "expected 0 or 1"};
        GripperState gripper = guard_invariant(field + ".gripper", [&] { return gripper_from_bit(g.get<int>()); });
        actions.push_back({pose, gripper});
    }

    return guard_invariant("record", [&] {
        return Episode(instruction.get<std::string>(), std::move(objects), std::move(velocities), std::move(actions));
    });
}

}  // namespace

std::string episode_to_json_line(const Episode& episode) {
    json record;
    record["instruction"] = episode.instruction();
    record["objects"] = json::array();
    for (const auto& obj : episode.objects()) {
        record["objects"].push_back({{"name", obj.name()}, {"pose", pose_to_json(obj.pose())}});
    }
    record["velocities"] = json::array();
    for (const auto& v : episode.velocities()) record["velocities"].push_back(v.values());
    record["actions"] = json::array();
    for (const auto& a : episode.actions()) {
        record["actions"].push_back({{"pose", pose_to_json(a.pose)}, {"gripper", gripper_bit(a.gripper)}});
    }
    return record.dump();
}

Episode episode_from_json_line(const std::string& line) {
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        throw PersistenceError(std::string("malformed record: ") + e.what());
    }
    try {
        return decode(record);
    } catch (const FieldError& e) {
        const std::string msg = "field '" + e.field + "': " + e.message;
        if (e.invariant) throw ValidationError(msg);
        throw PersistenceError(msg);
    }
}

void save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot open '" + path.string() + "' for writing");
    for (const auto& ep : episodes) out << episode_to_json_line(ep) << '\n';
    out.flush();
    if (!out) throw PersistenceError("write to '" + path.string() + "' failed");
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("cannot open '" + path.string() + "' for reading");
    std::vector<Episode> episodes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        try {
            episodes.push_back(episode_from_json_line(line));
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        } catch (const PersistenceError& e) {
            throw PersistenceError(where + e.what());
        }
    }
    if (in.bad()) throw PersistenceError("read from '" + path.string() + "' failed");
    return episodes;
}

}  // namespace actprompt
