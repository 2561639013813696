#!/usr/bin/env python3
"""Writes descriptions, mock replies and benchmark cases under data/.

  data/descriptions/<scene>_<k>.txt   five pre-generated description variants per scene
  data/mocks/describe_<scene>.json    describer reply for `populace describe`
  data/mocks/sim_<scene>.json         cycling narrator/parser replies for live runs
  data/cases/*.json + data/mocks/*    sample benchmark cases; every mock is written to pass
  data/cases_flaky/*.json             one case whose mock fails one repeat out of five

The cases are format-compatible samples authored for this repository.
"""

import argparse
import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

# ---------------------------------------------------------------- descriptions

AREAS = {
    "house": [
        ("kitchen", "along the north wall, with stove_1, sink_1, refrigerator_1 and the cabinets "
                    "cabinet_1, cabinet_2, cabinet_3 and cabinet_4", "cook, wash dishes or fetch food"),
        ("dining area", "in the south west, where table_1 is surrounded by chair_1, chair_2, chair_3 and "
                        "chair_4 and holds two cups", "eat, drink and talk"),
        ("living room", "on the east side, with sofa_1 facing tv_1 on tv_stand_1, coffee_table_1 between "
                        "them, bookshelf_1 on the east wall and two floor lamps", "watch TV, read or relax"),
    ],
    "office": [
        ("work area", "in the west half, with eight desks in two rows, each with a monitor and a desk chair",
         "work and type"),
        ("meeting room", "in the north east, where table_1 is surrounded by six chairs and whiteboard_2 "
                         "hangs on the north wall", "hold meetings and present"),
        ("lounge", "in the middle south, with sofa_1 and sofa_2 around table_2 and coffee_machine_1 on "
                   "cabinet_4", "rest, drink and make coffee"),
        ("reception", "in the south east, where reception_desk_1 faces three waiting chairs chair_1, "
                      "chair_2 and chair_3", "wait and talk to the receptionist"),
    ],
    "restaurant": [
        ("dining hall", "filling the south and middle, with five square tables and four chairs around each",
         "eat, drink, order and talk"),
        ("kitchen", "along the north wall, with stove_1, sink_1, refrigerator_1, two cabinets and counter_2",
         "cook and wash dishes"),
        ("service counter", "at counter_1 in the north east, where cash_register_1 stands",
         "order and pay"),
    ],
}

STYLES = [
    lambda n, a: f"The {n} contains these functional areas. " + " ".join(
        f"The {name} lies {where}; characters can {what} there." for name, where, what in a),
    lambda n, a: " ".join(
        f"{name.capitalize()}: {where}. Suitable activities: {what}." for name, where, what in a),
    lambda n, a: f"This {n} is organised into {len(a)} zones. " + " ".join(
        f"Zone {i + 1} is the {name}, {where}, used to {what}." for i, (name, where, what) in enumerate(a)),
    lambda n, a: " ".join(
        f"Characters who want to {what} go to the {name}, {where}." for name, where, what in reversed(a)),
    lambda n, a: f"Overview of the {n}. " + " ".join(
        f"In the {name} ({where}) one can {what}." for name, where, what in a[1:] + a[:1]),
]


def descriptions(scene):
    return [style(scene, AREAS[scene]) + "\n" for style in STYLES]


# ---------------------------------------------------------------- helpers

def code(body, doc=None, name="plan"):
    lines = [f"def {name}():"]
    if doc:
        lines.append(f'    """{doc}"""')
    lines += ["    " + ln if ln else "" for ln in body.strip("\n").split("\n")]
    return "```python\n" + "\n".join(lines) + "\n```"


def narration(reasoning, event, participants):
    return f"Reasoning: {reasoning}\nEvent: {event}\nParticipants: {', '.join(participants)}"


def reply(role, text, match=None):
    r = {"role": role, "text": text}
    if match:
        r["match"] = match
    return r


def rx_escape(text):
    return "".join("\\" + c if c in ".^$|?*+()[]{}\\/" else c for c in text)


def idle(*names):
    return "[Ii]dle characters: " + "".join(f"(?=[^\\n]*\\b{n}\\b)" for n in names)


def sit_chair_near(var, table, action, occupied_check=True):
    skip = " and not is_object_occupied(c)" if occupied_check else ""
    return (f"seat = None\n"
            f"for c in get_objects_close_to(\"{table}\"):\n"
            f"    if seat == None and is_object_of_label(c, \"chair\"){skip}:\n"
            f"        seat = c\n"
            f"{var}.set_position(get_area_to_sit_on(seat))\n"
            f"{var}.set_target_action(\"{action}\")\n")


FARTHEST_SEAT_LISTING = '''"""
Event to parse:
[Sara] drinks a beverage while sitting in the seat farthest from the reception desk
"""
def parse_event():
    desk = "reception_desk_1"
    chairs = ["chair_1", "chair_2", "chair_3"]
    max_distance = 0
    farthest_chair = chairs[0]
    for chair in chairs:
        distance = get_distance_between(desk, chair)
        if distance > max_distance:
            farthest_chair = chair
            max_distance = distance
    target_area = get_area_to_sit_on(farthest_chair)

    sara = get_character("Sara")
    sara.set_position(target_area)
    sara.set_target_action("drink")
    return [sara]
'''


# ---------------------------------------------------------------- live-run mocks

def sim_events(scene):
    """(participants, event text, parser body) triples for cycling mocks."""
    if scene == "house":
        return [
            (["Sara", "Tom"], "Sara and Tom sit down at the dining table for lunch.",
             'sara = get_character("Sara")\n' + sit_chair_near("sara", "table_1", "eat") +
             'tom = get_character("Tom")\n'
             'tom.set_position(get_area_to_sit_on("chair_2"))\n'
             'tom.set_target_action("eat")\n'
             'return [sara, tom]'),
            (["Mia"], "Mia cooks a meal at the stove.",
             'mia = get_character("Mia")\n'
             'mia.set_position(get_area_to_interact_with("stove_1"))\n'
             'mia.set_orientation("stove_1")\n'
             'mia.set_target_action("cook")\n'
             'return [mia]'),
            (["Tom"], "Tom washes the dishes at the sink.",
             'tom = get_character("Tom")\n'
             'tom.set_position(get_area_to_interact_with("sink_1"))\n'
             'tom.set_orientation("sink_1")\n'
             'tom.set_target_action("wash_dishes")\n'
             'return [tom]'),
            (["Sara"], "Sara picks a book and reads in front of the bookshelf.",
             'sara = get_character("Sara")\n'
             'sara.set_position(get_area_in_front_of("bookshelf_1"))\n'
             'sara.set_orientation("bookshelf_1")\n'
             'sara.set_target_action("read")\n'
             'return [sara]'),
            (["Mia"], "Mia relaxes on the sofa and watches TV.",
             'mia = get_character("Mia")\n'
             'mia.set_position(get_area_to_sit_on("sofa_1"))\n'
             'mia.set_target_action("watch_tv")\n'
             'return [mia]'),
            (["Sara", "Mia"], "Sara and Mia chat next to the coffee table.",
             'sara = get_character("Sara")\n'
             'mia = get_character("Mia")\n'
             'sara.set_position(get_area_adjacent_to("coffee_table_1"))\n'
             'mia.set_position(get_area_adjacent_to("coffee_table_1"))\n'
             'sara.set_orientation(mia)\n'
             'mia.set_orientation(sara)\n'
             'sara.set_target_action("talk")\n'
             'mia.set_target_action("talk")\n'
             'return [sara, mia]'),
            (["Tom"], "Tom stretches in the living room.",
             'tom = get_character("Tom")\n'
             'tom.set_position(get_area_close_to("coffee_table_1"))\n'
             'tom.set_target_action("stretch")\n'
             'return [tom]'),
        ]
    if scene == "office":
        return [
            (["Sara"], "Sara drinks a beverage while sitting in the seat farthest from the reception desk.",
             None),
            (["Tom"], "Tom works at the desk with the first monitor.",
             'tom = get_character("Tom")\n' + sit_chair_near("tom", "desk_1", "work") + 'return [tom]'),
            (["Mia"], "Mia makes coffee at the coffee machine.",
             'mia = get_character("Mia")\n'
             'mia.set_position(get_area_to_interact_with("coffee_machine_1"))\n'
             'mia.set_orientation("coffee_machine_1")\n'
             'mia.set_target_action("make_coffee")\n'
             'return [mia]'),
            (["Tom", "Mia"], "Tom and Mia hold a short meeting at the meeting table.",
             'tom = get_character("Tom")\n'
             'mia = get_character("Mia")\n'
             'tom.set_position(get_area_to_sit_on("chair_16"))\n'
             'mia.set_position(get_area_to_sit_on("chair_10"))\n'
             'tom.set_target_action("talk")\n'
             'mia.set_target_action("talk")\n'
             'return [tom, mia]'),
            (["Sara"], "Sara presents her slides at the meeting room whiteboard.",
             'sara = get_character("Sara")\n'
             'board = get_closest_object("table_1", ["whiteboard_1", "whiteboard_2"])\n'
             'sara.set_position(get_area_in_front_of(board))\n'
             'sara.set_orientation(board)\n'
             'sara.set_target_action("present")\n'
             'return [sara]'),
            (["Mia"], "Mia prints a document at the printer.",
             'mia = get_character("Mia")\n'
             'mia.set_position(get_area_to_interact_with("printer_1"))\n'
             'mia.set_orientation("printer_1")\n'
             'mia.set_target_action("print")\n'
             'return [mia]'),
            (["Sara", "Tom"], "Sara and Tom take a break on the two lounge sofas.",
             'sara = get_character("Sara")\n'
             'tom = get_character("Tom")\n'
             'sara.set_position(get_area_to_sit_on("sofa_1"))\n'
             'tom.set_position(get_area_to_sit_on("sofa_2"))\n'
             'sara.set_target_action("rest")\n'
             'tom.set_target_action("rest")\n'
             'return [sara, tom]'),
        ]
    return [
        (["Sara"], "Sara cooks the daily special at the stove.",
         'sara = get_character("Sara")\n'
         'sara.set_position(get_area_to_interact_with("stove_1"))\n'
         'sara.set_orientation("stove_1")\n'
         'sara.set_target_action("cook")\n'
         'return [sara]'),
        (["Tom", "Mia"], "Tom and Mia have dinner together at a table by the window.",
         'tom = get_character("Tom")\n'
         'mia = get_character("Mia")\n'
         'tom.set_position(get_area_to_sit_on("chair_19"))\n'
         'mia.set_position(get_area_to_sit_on("chair_5"))\n'
         'tom.set_target_action("eat")\n'
         'mia.set_target_action("eat")\n'
         'return [tom, mia]'),
        (["Sara"], "Sara serves plates at the middle table.",
         'sara = get_character("Sara")\n'
         'sara.set_position(get_area_adjacent_to("table_3"))\n'
         'sara.set_orientation("table_3")\n'
         'sara.set_target_action("serve")\n'
         'return [sara]'),
        (["Mia"], "Mia pays at the cash register.",
         'mia = get_character("Mia")\n'
         'mia.set_position(get_area_to_interact_with("cash_register_1"))\n'
         'mia.set_orientation("cash_register_1")\n'
         'mia.set_target_action("pay")\n'
         'return [mia]'),
        (["Tom"], "Tom washes the dishes in the kitchen sink.",
         'tom = get_character("Tom")\n'
         'tom.set_position(get_area_to_interact_with("sink_1"))\n'
         'tom.set_orientation("sink_1")\n'
         'tom.set_target_action("wash_dishes")\n'
         'return [tom]'),
        (["Sara", "Tom"], "Sara and Tom talk at the service counter.",
         'sara = get_character("Sara")\n'
         'tom = get_character("Tom")\n'
         'sara.set_position(get_area_in_front_of("counter_1"))\n'
         'tom.set_position(get_area_in_front_of("counter_1"))\n'
         'sara.set_orientation(tom)\n'
         'tom.set_orientation(sara)\n'
         'sara.set_target_action("talk")\n'
         'tom.set_target_action("talk")\n'
         'return [sara, tom]'),
        (["Mia"], "Mia eats dessert at the table near the kitchen.",
         'mia = get_character("Mia")\n' + sit_chair_near("mia", "table_3", "eat") + 'return [mia]'),
    ]


def sim_mock(scene):
    replies = []
    for who, event, body in sim_events(scene):
        replies.append(reply("narrator",
                             narration(f"{' and '.join(who)} are free and the scene needs variety.", event, who),
                             idle(*who)))
    for who, event, body in sim_events(scene):
        text = "```python\n" + FARTHEST_SEAT_LISTING + "```" if body is None else code(body, doc=event)
        replies.append(reply("parser", text, "Event: " + rx_escape(event)))
    return {"model": "mock", "cycle": True, "replies": replies}


# ---------------------------------------------------------------- benchmark cases

def case(cid, scene, chars, scenario, actions, area, tags, event, body, history=(), coord=False,
         reasoning="The target character is idle and the scenario names the activity."):
    doc = {
        "id": cid, "scene": scene, "characters": chars, "scenario": scenario,
        "history": list(history),
        "expected": {"actions": actions, "area": area},
        "tags": tags, "coordinate_level": coord, "mock": cid + ".json",
        "note": "sample case authored for this repository",
    }
    parser_text = "```python\n" + FARTHEST_SEAT_LISTING + "```" if body is None else code(body, doc=event)
    mock = {"model": "mock", "replies": [reply("narrator", narration(reasoning, event, [chars[0]])),
                                         reply("parser", parser_text)]}
    return doc, mock


def leaf(kind, *anchors):
    return {"area": kind, "anchor": anchors[0]} if len(anchors) == 1 else {"area": kind, "anchors": list(anchors)}


def cases():
    out = []
    out.append(case(
        "house_oa_01", "house", ["Sara", "Tom"], "Sara wants to eat on the chair farthest from the refrigerator.",
        ["eat"], leaf("sit_on", "chair_4"), ["OA"],
        "Sara eats at the dining chair farthest from the refrigerator.",
        'sara = get_character("Sara")\n'
        'best = None\n'
        'best_d = -1\n'
        'for c in get_objects_close_to("table_1"):\n'
        '    if is_object_of_label(c, "chair"):\n'
        '        d = get_distance_between(c, "refrigerator_1")\n'
        '        if d > best_d:\n'
        '            best = c\n'
        '            best_d = d\n'
        'sara.set_position(get_area_to_sit_on(best))\n'
        'sara.set_target_action("eat")\n'
        'return [sara]'))
    out.append(case(
        "house_rc_01", "house", ["Tom", "Sara"], "Tom is hungry and wants to make some food.",
        ["cook"], leaf("interact_with", "stove_1"), ["RC"],
        "Tom cooks a snack at the kitchen stove.",
        'tom = get_character("Tom")\n'
        'tom.set_position(get_area_to_interact_with("stove_1"))\n'
        'tom.set_orientation("stove_1")\n'
        'tom.set_target_action("cook")\n'
        'return [tom]'))
    out.append(case(
        "house_ss_01", "house", ["Sara", "Tom"], "Sara joins Tom for lunch at the dining table.",
        ["eat", "drink"],
        {"union": [leaf("sit_on", "chair_1"), leaf("sit_on", "chair_2"), leaf("sit_on", "chair_4")]},
        ["SS", "OA"], "Sara sits down at the dining table to eat with Tom.",
        'sara = get_character("Sara")\n' + sit_chair_near("sara", "table_1", "eat") + 'return [sara]',
        history=[{"description": "Tom eats lunch at the dining table.", "status": "ongoing",
                  "participants": ["Tom"],
                  "grounding": [{"character": "Tom", "action": "eat", "area": leaf("sit_on", "chair_3")}]}],
        reasoning="Tom is busy eating, so only Sara can start an event; she can join him."))
    out.append(case(
        "house_pi_01", "house", ["Mia", "Sara"], "Mia checks her phone standing between the sofa and the coffee table.",
        ["use_phone"], leaf("between", "sofa_1", "coffee_table_1"), ["PI"],
        "Mia uses her phone between the sofa and the coffee table.",
        'mia = get_character("Mia")\n'
        'mia.set_position(get_area_between("sofa_1", "coffee_table_1"))\n'
        'mia.set_target_action("use_phone")\n'
        'return [mia]', coord=True))
    out.append(case(
        "office_oa_01", "office", ["Sara", "Tom"],
        "Sara wants a drink in the seat farthest from the reception desk.",
        ["drink"], leaf("sit_on", "chair_1"), ["OA", "PI"],
        "Sara drinks a beverage while sitting in the seat farthest from the reception desk.", None, coord=True))
    out.append(case(
        "office_rc_01", "office", ["Tom", "Mia"], "Tom needs a coffee before work.",
        ["make_coffee"], leaf("interact_with", "coffee_machine_1"), ["RC"],
        "Tom makes a coffee at the coffee machine in the lounge.",
        'tom = get_character("Tom")\n'
        'tom.set_position(get_area_to_interact_with("coffee_machine_1"))\n'
        'tom.set_orientation("coffee_machine_1")\n'
        'tom.set_target_action("make_coffee")\n'
        'return [tom]'))
    out.append(case(
        "office_ss_01", "office", ["Tom", "Mia"], "Tom also wants coffee.",
        ["wait"], leaf("close_to", "coffee_machine_1"), ["SS"],
        "Tom waits near the coffee machine until Mia is done.",
        'tom = get_character("Tom")\n'
        'tom.set_position(get_area_close_to("coffee_machine_1"))\n'
        'tom.set_orientation("coffee_machine_1")\n'
        'tom.set_target_action("wait")\n'
        'return [tom]',
        history=[{"description": "Mia makes coffee at the coffee machine.", "status": "ongoing",
                  "participants": ["Mia"],
                  "grounding": [{"character": "Mia", "action": "make_coffee",
                                 "area": leaf("interact_with", "coffee_machine_1")}]}],
        reasoning="Mia is using the coffee machine, so Tom has to wait beside it."))
    out.append(case(
        "office_rc_02", "office", ["Sara", "Tom", "Mia"], "Sara has to present to the team.",
        ["present"], leaf("in_front_of", "whiteboard_2"), ["RC", "OA"],
        "Sara presents at the whiteboard of the meeting room.",
        'sara = get_character("Sara")\n'
        'board = get_closest_object("table_1", ["whiteboard_1", "whiteboard_2"])\n'
        'sara.set_position(get_area_in_front_of(board))\n'
        'sara.set_orientation(board)\n'
        'sara.set_target_action("present")\n'
        'return [sara]',
        history=[{"description": "Tom and Mia arrive for the weekly meeting.", "status": "completed",
                  "participants": ["Tom", "Mia"]}]))
    out.append(case(
        "restaurant_rc_01", "restaurant", ["Sara", "Tom"], "Sara is the chef tonight.",
        ["cook"], leaf("interact_with", "stove_1"), ["RC"],
        "Sara cooks the first order at the stove.",
        'sara = get_character("Sara")\n'
        'sara.set_position(get_area_to_interact_with("stove_1"))\n'
        'sara.set_orientation("stove_1")\n'
        'sara.set_target_action("cook")\n'
        'return [sara]'))
    out.append(case(
        "restaurant_ss_01", "restaurant", ["Sara", "Tom"], "Sara joins Tom at his table.",
        ["eat", "talk", "drink"],
        {"union": [leaf("sit_on", "chair_11"), leaf("sit_on", "chair_14"), leaf("sit_on", "chair_15")]},
        ["SS", "OA"], "Sara sits down at Tom's table to talk with him.",
        'sara = get_character("Sara")\n' + sit_chair_near("sara", "table_4", "talk") + 'return [sara]',
        history=[{"description": "Tom eats at the table by the east window.", "status": "ongoing",
                  "participants": ["Tom"],
                  "grounding": [{"character": "Tom", "action": "eat", "area": leaf("sit_on", "chair_6")}]}],
        reasoning="Tom is eating; Sara can take any free chair at his table."))
    out.append(case(
        "restaurant_oa_01", "restaurant", ["Mia", "Sara"], "Mia has finished her meal and wants to pay.",
        ["pay"], leaf("interact_with", "cash_register_1"), ["OA"],
        "Mia pays at the cash register on the service counter.",
        'mia = get_character("Mia")\n'
        'register = None\n'
        'for o in get_objects_supported_by("counter_1"):\n'
        '    if is_object_of_label(o, "cash_register"):\n'
        '        register = o\n'
        'mia.set_position(get_area_to_interact_with(register))\n'
        'mia.set_orientation(register)\n'
        'mia.set_target_action("pay")\n'
        'return [mia]',
        history=[{"description": "Mia eats a pasta dish.", "status": "completed", "participants": ["Mia"]}]))
    out.append(case(
        "restaurant_pi_01", "restaurant", ["Mia", "Tom"], "Mia waits at the service counter to order.",
        ["wait", "order"], leaf("in_front_of", "counter_1"), ["PI", "RC"],
        "Mia waits in front of the service counter to order.",
        'mia = get_character("Mia")\n'
        'mia.set_position(get_area_in_front_of("counter_1"))\n'
        'mia.set_orientation("counter_1")\n'
        'mia.set_target_action("order")\n'
        'return [mia]', coord=True))
    return out


def flaky_case():
    doc, mock = case(
        "office_farthest_seat_flaky", "office", ["Sara", "Tom"],
        "Sara wants a drink in the seat farthest from the reception desk.",
        ["drink"], leaf("sit_on", "chair_1"), ["OA"],
        "Sara drinks a beverage while sitting in the seat farthest from the reception desk.", None)
    good = mock["replies"]
    broken = code('sara = get_character("Sara")\n'
                  'sara.set_position(get_area_to_sit_on("armchair_9"))\n'
                  'sara.set_target_action("drink")\n'
                  'return [sara]')
    bad_trial = [good[0]] + [reply("parser", broken)] * 3
    doc["note"] = "one of five repeats references a nonexistent object in every parser attempt"
    return doc, {"model": "mock", "trials": [good, good, bad_trial, good, good]}


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--data", default=str(ROOT / "data"))
    data = Path(ap.parse_args().data)
    for scene in AREAS:
        for k, text in enumerate(descriptions(scene)):
            (data / "descriptions").mkdir(parents=True, exist_ok=True)
            (data / "descriptions" / f"{scene}_{k}.txt").write_text(text)
        write(data / "mocks" / f"describe_{scene}.json",
              {"model": "mock", "replies": [reply("describer", descriptions(scene)[0].strip())]})
        write(data / "mocks" / f"sim_{scene}.json", sim_mock(scene))
    for doc, mock in cases():
        write(data / "cases" / f"{doc['id']}.json", doc)
        write(data / "mocks" / doc["mock"], mock)
    doc, mock = flaky_case()
    write(data / "cases_flaky" / f"{doc['id']}.json", doc)
    write(data / "mocks" / doc["mock"], mock)
    print("fixtures written to", data)


if __name__ == "__main__":
    main()
