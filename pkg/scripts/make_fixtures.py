"""Regenerates tests/fixtures from first principles.

Run from the repository root:

    python3 scripts/make_fixtures.py

The golden files carry exact expected bytes; the replay file is keyed by
the exact generation prompts, so regenerate it whenever the prompt text or
the seed/registry fixtures change.
"""

from __future__ import annotations

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
GOLDEN = FIXTURES / "golden"

EVENTS_OBSERVATION = (
    "{'events': [{'name': 'Jazz Festival', 'date': '2023-10-07', 'location': "
    "'Central Park'}, {'name': 'Food Truck Rally', 'date': '2023-10-08', "
    "'location': 'Union Square'}]}"
)
TICKETS_OBSERVATION = (
    "{'status': 'success', 'message': 'You have successfully purchased 2 "
    "tickets for the Jazz Festival.'}"
)

TURN1_USER = "I'm looking for events happening in New York this weekend."
TURN1_THOUGHT1 = (
    "The user wants to find events in a specific location and timeframe.\n"
    "I'll need to call the FindEvents API with the appropriate category and city."
)
TURN1_ACTION = "FindEvents(category='all', city_of_event='New York')"
TURN1_THOUGHT2 = "I have the event details now. I should summarize the events for the user."
TURN1_SYSTEM = (
    "This weekend in New York, you can attend the Jazz Festival at Central Park "
    "on October 7th and the Food Truck Rally at Union Square on October 8th. "
    "Would you like more information about any of these events?"
)
TURN2_USER = "Yes, can you tell me more about the Jazz Festival?"
TURN2_THOUGHT = (
    "I need to provide more details about the Jazz Festival. "
    "I don't need an API call for that."
)
TURN2_SYSTEM = (
    "The Jazz Festival in Central Park will feature various artists performing "
    "live jazz music throughout the day. It starts at 11 AM and goes until 8 PM. "
    "Would you like to know how to get tickets?"
)
TURN3_USER = "Yes, please tell me how to get tickets for the Jazz Festival."
TURN3_THOUGHT1 = (
    "The user is interested in purchasing tickets. "
    "I need to call the BuyEventTickets API for the Jazz Festival."
)
TURN3_ACTION = (
    "BuyEventTickets(event_name='Jazz Festival', number_of_seats=2, "
    "date='2023-10-07', city_of_event='New York')"
)
TURN3_THOUGHT2 = "The tickets were successfully purchased. I need to confirm this with the user."
TURN3_SYSTEM = (
    "You have successfully purchased 2 tickets for the Jazz Festival in "
    "Central Park! Enjoy the music!"
)

SGD_HISTORY = f"""User: {TURN1_USER}
Thought: {TURN1_THOUGHT1}
Action: {TURN1_ACTION}
Observation: {EVENTS_OBSERVATION}
Thought: {TURN1_THOUGHT2}
System: {TURN1_SYSTEM}
User: {TURN2_USER}
Thought: {TURN2_THOUGHT}
System: {TURN2_SYSTEM}"""

SGD_ACTION_INPUT = f"""User: {TURN3_USER}
Thought: {TURN3_THOUGHT1}"""

SGD_ACTION_OUTPUT = f"Action: {TURN3_ACTION}"

SGD_RESPONSE_INPUT = f"""User: {TURN3_USER}
Thought: {TURN3_THOUGHT1}
Action: {TURN3_ACTION}
Observation: {TICKETS_OBSERVATION}
Thought: {TURN3_THOUGHT2}"""

SGD_RESPONSE_OUTPUT = f"System: {TURN3_SYSTEM}"

HAMMER_TOOLS = [
    {
        "name": "LxOm64zLyg",
        "description": (
            "Gets hourly weather forecast information for given geographical "
            "coordinates using the RapidAPI service."
        ),
        "parameters": {
            "TDpjPd": {
                "description": "The latitude of the geographical location.",
                "type": "int",
                "default": 46.95828,
            },
            "78th2U3lFj": {
                "description": "The longitude of the geographical location.",
                "type": "int",
                "default": 10.87152,
            },
        },
    },
    {
        "name": "WoDdNSe7e7K5",
        "description": (
            "Fetches weather updates for a given city using the RapidAPI "
            "Weather API."
        ),
        "parameters": {
            "LzZsvxUC": {
                "description": (
                    "The name of the city for which to retrieve weather "
                    "information."
                ),
                "type": "str",
                "default": "London",
            }
        },
    },
    {
        "name": "CBrCNmwOERb",
        "description": (
            "Fetches the hourly weather forecast for a given location using "
            "the RapidAPI service."
        ),
        "parameters": {
            "TDEJ.ZwMt": {
                "description": (
                    "The name of the location for which to retrieve the "
                    "hourly weather forecast."
                ),
                "type": "str",
                "default": "Berlin",
            }
        },
    },
    {
        "name": "1YTQVXkwLY",
        "description": "Returns an air quality forecast for a given location.",
        "parameters": {
            "2bkgDA": {
                "description": (
                    "The latitude of the location for which the air quality "
                    "forecast is to be retrieved."
                ),
                "type": "int",
                "default": "35.779",
            },
            "DQi.ReZ16": {
                "description": (
                    "The longitude of the location for which the air quality "
                    "forecast is to be retrieved."
                ),
                "type": "int",
                "default": "-78.638",
            },
            "hF.1": {
                "description": (
                    "The number of hours for which the forecast is to be "
                    "retrieved (default is 72)."
                ),
                "type": "int",
                "default": "72",
            },
        },
    },
]

HAMMER_SAMPLE = {
    "query": "What are the current weather conditions in Sydney?",
    "output": '[{"name": "WoDdNSe7e7K5", "arguments": {"LzZsvxUC": "Sydney"}}]',
}

SNIPS_SAMPLE = {
    "utterance": (
        "Book a table at a restaurant in Portugal with parking for me and "
        "bonnie in 19 minutes"
    ),
    "domain": "BookRestaurant",
    "slots": {
        "restaurant_type": "restaurant",
        "country": "Portugal",
        "facility": "parking",
        "party_size_description": "me and bonnie",
        "timeRange": "in 19 minutes",
    },
    "input": (
        "User: Book a table at a restaurant in Portugal with parking for me "
        "and bonnie in 19 minutes"
    ),
    "output": (
        'System: {"domain": "BookRestaurant", "slot_values": {"restaurant_type": '
        '"restaurant", "country": "Portugal", "facility": "parking", '
        '"party_size_description": "me and bonnie", "timeRange": "in 19 minutes"}}'
    ),
}

REGISTRY = [
    {
        "name": "FindEvents",
        "description": "Finds cultural events, concerts, and activities in a city.",
        "parameters": {
            "category": {
                "description": "The category of events to search for.",
                "type": "str",
                "default": "all",
            },
            "city_of_event": {
                "description": "The city in which to look for events.",
                "type": "str",
            },
        },
    },
    {
        "name": "BuyEventTickets",
        "description": "Purchases tickets for an event on a given date.",
        "parameters": {
            "event_name": {"description": "The name of the event.", "type": "str"},
            "number_of_seats": {
                "description": "How many tickets to purchase.",
                "type": "int",
            },
            "date": {"description": "The date of the event.", "type": "str"},
            "city_of_event": {
                "description": "The city where the event takes place.",
                "type": "str",
            },
        },
    },
    {
        "name": "FindRestaurants",
        "description": "Searches for restaurants by cuisine in a location.",
        "parameters": {
            "category": {"description": "The cuisine to search for.", "type": "str"},
            "location": {"description": "The city to search in.", "type": "str"},
        },
    },
    {
        "name": "ReserveRestaurant",
        "description": "Books a table at a restaurant.",
        "parameters": {
            "restaurant_name": {
                "description": "The name of the restaurant.",
                "type": "str",
            },
            "location": {"description": "The city of the restaurant.", "type": "str"},
            "time": {"description": "The reservation time.", "type": "str"},
            "number_of_seats": {
                "description": "The party size.",
                "type": "int",
                "default": 2,
            },
        },
    },
    {
        "name": "GetWeather",
        "description": "Reports the weather in a city.",
        "parameters": {
            "city": {"description": "The city to report on.", "type": "str"}
        },
    },
    {
        "name": "PlaySong",
        "description": "Plays a song by title and artist.",
        "parameters": {
            "song_name": {"description": "The song title.", "type": "str"},
            "artist": {
                "description": "The performing artist.",
                "type": "str",
                "default": "any",
            },
        },
    },
    {
        "name": "FindProvider",
        "description": "Finds a service provider in a city.",
        "parameters": {
            "city": {"description": "The city to search in.", "type": "str"},
            "type": {"description": "The kind of provider.", "type": "str"},
        },
    },
    {
        "name": "GetRide",
        "description": "Orders a ride to a destination.",
        "parameters": {
            "destination": {"description": "Where the ride goes.", "type": "str"},
            "number_of_riders": {"description": "The party size.", "type": "int"},
            "shared_ride": {
                "description": "Whether the ride may be shared.",
                "type": "bool",
            },
        },
    },
]

COMPACT_FUNCTIONS = """1. FindEvents(category, city_of_event)
2. BuyEventTickets(event_name, number_of_seats, date, city_of_event)
3. FindRestaurants(category, location)
4. ReserveRestaurant(restaurant_name, location, time, number_of_seats)
5. GetWeather(city)
6. PlaySong(song_name, artist)
7. FindProvider(city, type)
8. GetRide(destination, number_of_riders, shared_ride)
"""

SNIPS_RECORDS = [
    {
        "utterance": SNIPS_SAMPLE["utterance"],
        "domain": "BookRestaurant",
        "slots": SNIPS_SAMPLE["slots"],
    },
    {
        "utterance": "What's the weather like in Boston tomorrow",
        "domain": "GetWeather",
        "slots": {"city": "Boston", "timeRange": "tomorrow"},
    },
    {
        "utterance": "Play some jazz from the album Kind of Blue",
        "domain": "PlayMusic",
        "slots": {"genre": "jazz", "album": "Kind of Blue"},
    },
    {
        "utterance": "Add this track by Leon Bridges to my playlist",
        "domain": "AddToPlaylist",
        "slots": {"music_item": "track", "artist": "Leon Bridges"},
    },
    {
        "utterance": "Rate this current novel four out of six stars",
        "domain": "RateBook",
        "slots": {
            "object_select": "current",
            "object_type": "novel",
            "rating_value": "four",
            "best_rating": "six",
            "rating_unit": "stars",
        },
    },
]

FC_RECORDS = [
    {
        "id": "fc-0001",
        "query": "What are the current weather conditions in Sydney?",
        "tools": [
            {
                "name": "hourly_forecast",
                "description": HAMMER_TOOLS[0]["description"],
                "parameters": {
                    "lat": HAMMER_TOOLS[0]["parameters"]["TDpjPd"],
                    "lon": HAMMER_TOOLS[0]["parameters"]["78th2U3lFj"],
                },
            },
            {
                "name": "get_weather_updates",
                "description": HAMMER_TOOLS[1]["description"],
                "parameters": {"city": HAMMER_TOOLS[1]["parameters"]["LzZsvxUC"]},
            },
            {
                "name": "rapidapi_hourly_forecast",
                "description": HAMMER_TOOLS[2]["description"],
                "parameters": {"location": HAMMER_TOOLS[2]["parameters"]["TDEJ.ZwMt"]},
            },
            {
                "name": "air_quality_forecast",
                "description": HAMMER_TOOLS[3]["description"],
                "parameters": {
                    "lat": HAMMER_TOOLS[3]["parameters"]["2bkgDA"],
                    "lon": HAMMER_TOOLS[3]["parameters"]["DQi.ReZ16"],
                    "hours": HAMMER_TOOLS[3]["parameters"]["hF.1"],
                },
            },
        ],
        "calls": [
            {"name": "get_weather_updates", "arguments": {"city": "Sydney"}}
        ],
    },
    {
        "id": "fc-0002",
        "query": "Fetch the latest exchange rate from USD to EUR and then from USD to JPY.",
        "tools": [
            {
                "name": "exchange_rate",
                "description": "Fetches the latest exchange rate between two currencies.",
                "parameters": {
                    "from_currency": {
                        "description": "The currency to convert from.",
                        "type": "str",
                    },
                    "to_currency": {
                        "description": "The currency to convert to.",
                        "type": "str",
                    },
                },
            }
        ],
        "calls": [
            {
                "name": "exchange_rate",
                "arguments": {"from_currency": "USD", "to_currency": "EUR"},
            },
            {
                "name": "exchange_rate",
                "arguments": {"from_currency": "USD", "to_currency": "JPY"},
            },
        ],
    },
    {
        "id": "fc-0003",
        "query": "Can you write me a short poem about autumn leaves?",
        "tools": [
            {
                "name": "search_flights",
                "description": "Searches for flights between two airports on a date.",
                "parameters": {
                    "origin": {"description": "Departure airport.", "type": "str"},
                    "destination": {"description": "Arrival airport.", "type": "str"},
                    "date": {"description": "Travel date.", "type": "str"},
                },
            }
        ],
        "calls": [],
    },
]

SEEDS = [
    {
        "id": "sgd-dev-0001",
        "services": ["Events_3"],
        "turns": [
            {"user": TURN1_USER, "system": TURN1_SYSTEM},
            {"user": TURN2_USER, "system": TURN2_SYSTEM},
            {"user": TURN3_USER, "system": TURN3_SYSTEM},
        ],
    },
    {
        "id": "sgd-dev-0002",
        "services": ["Restaurants_2"],
        "turns": [
            {
                "user": "Can you find me a Thai restaurant in San Jose?",
                "system": (
                    "I found 4 options. How about Thai Basil on North First Street?"
                ),
            },
            {
                "user": "Sounds good, book a table for two at 7 pm tonight.",
                "system": (
                    "Your table for 2 at Thai Basil in San Jose is booked for "
                    "7 pm tonight."
                ),
            },
        ],
    },
]

REPLY_1 = f"""User: {TURN1_USER}
Thought1: {TURN1_THOUGHT1}
API Name: FindEvents
API Input: {{'category': 'all', 'city_of_event': 'New York'}}
API Result: {EVENTS_OBSERVATION}
Thought2: {TURN1_THOUGHT2}
System: {TURN1_SYSTEM}

User: {TURN2_USER}
Thought: {TURN2_THOUGHT}
System: {TURN2_SYSTEM}

User: {TURN3_USER}
Thought1: {TURN3_THOUGHT1}
API Name: BuyEventTickets
API Input: {{'event_name': 'Jazz Festival', 'number_of_seats': 2, 'date': '2023-10-07', 'city_of_event': 'New York'}}
API Result: {TICKETS_OBSERVATION}
Thought2: {TURN3_THOUGHT2}
System: {TURN3_SYSTEM}
"""

REPLY_2 = """User: Can you find me a Thai restaurant in San Jose?
Thought1: The user wants a Thai restaurant in San Jose. I should search with the FindRestaurants API.
API Name: FindRestaurants
API Input: {'category': 'Thai', 'city': 'San Jose'}
API Result: {'restaurants': [{'name': 'Thai Basil', 'street': 'North First Street'}, {'name': 'Siam Orchid', 'street': 'Park Avenue'}, {'name': 'Lotus Kitchen', 'street': 'Second Street'}, {'name': 'Bangkok Garden', 'street': 'Tenth Street'}]}
Thought2: I found four Thai restaurants. I should suggest the first option to the user.
System: I found 4 options. How about Thai Basil on North First Street?

User: Sounds good, book a table for two at 7 pm tonight.
Thought1: The user accepted Thai Basil and wants a reservation for two at 7 pm. I need to call the ReserveRestaurant API.
API Name: ReserveRestaurant
API Input: {'restaurant_name': 'Thai Basil', 'location': 'San Jose', 'time': '7 pm'}
API Result: {'status': 'success', 'message': 'Table for 2 reserved at Thai Basil for 7 pm.'}
Thought2: The reservation was confirmed. I should let the user know.
System: Your table for 2 at Thai Basil in San Jose is booked for 7 pm tonight.
"""

# The second dialogue deliberately calls FindRestaurants with a 'city'
# argument the schema does not declare, so the shipped run exercises the
# UnknownArgument flag path; the first dialogue validates clean.

CONFIG = {
    "registry_path": "registry.json",
    "snips_path": "snips.jsonl",
    "fc_path": "fc.jsonl",
    "seeds_path": "seeds.jsonl",
    "output_dir": "out",
    "mask_seed": 13,
    "shuffle_seed": 17,
    "review_seed": 19,
    "mask_probability": 0.5,
    "review_sample_size": 2,
    "generation": {"model_id": "mock", "replay_path": "replay.jsonl", "retries": 2},
}

EVAL_RECORDS = [
    {
        "id": "ev-state-1",
        "kind": "state",
        "gold": {"domain": "BookRestaurant", "slot_values": {"city": "Lisbon"}},
        "predicted": {"domain": "BookRestaurant", "slot_values": {"city": "  lisbon "}},
    },
    {
        "id": "ev-state-2",
        "kind": "state",
        "gold": {"domain": "GetWeather", "slot_values": {"city": "Boston"}},
        "predicted": {"domain": "GetWeather", "slot_values": {"city": "Austin"}},
    },
    {
        "id": "ev-calls-1",
        "kind": "calls",
        "gold": [{"name": "get_weather_updates", "arguments": {"city": "Sydney"}}],
        "predicted": [
            {"name": "get_weather_updates", "arguments": {"city": "Sydney"}}
        ],
    },
    {
        "id": "ev-calls-2",
        "kind": "calls",
        "gold": [
            {
                "name": "exchange_rate",
                "arguments": {"from_currency": "USD", "to_currency": "EUR"},
            }
        ],
        "predicted": [
            {
                "name": "exchange_rate",
                "arguments": {"from_currency": "USD", "to_currency": "GBP"},
            }
        ],
    },
    {
        "id": "ev-text-1",
        "kind": "text",
        "gold": "the cat sat",
        "predicted": "the cat",
        "level": "action",
    },
    {
        "id": "ev-text-2",
        "kind": "text",
        "gold": "You have successfully purchased 2 tickets.",
        "predicted": "You have successfully purchased 2 tickets.",
        "level": "response",
    },
    {"id": "ev-abstain-1", "kind": "abstain", "gold": True, "predicted": True},
    {"id": "ev-abstain-2", "kind": "abstain", "gold": False, "predicted": False},
]


def write_text(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


def write_jsonl(path: Path, docs) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        "".join(json.dumps(d, ensure_ascii=False) + "\n" for d in docs),
        encoding="utf-8",
    )


def main() -> None:
    write_text(GOLDEN / "sgd_history.txt", SGD_HISTORY)
    write_text(GOLDEN / "sgd_action_input.txt", SGD_ACTION_INPUT)
    write_text(GOLDEN / "sgd_action_output.txt", SGD_ACTION_OUTPUT)
    write_text(GOLDEN / "sgd_response_input.txt", SGD_RESPONSE_INPUT)
    write_text(GOLDEN / "sgd_response_output.txt", SGD_RESPONSE_OUTPUT)
    write_text(
        GOLDEN / "hammer_tools.json", json.dumps(HAMMER_TOOLS, ensure_ascii=False)
    )
    write_text(
        GOLDEN / "hammer_sample.json",
        json.dumps(HAMMER_SAMPLE, ensure_ascii=False, indent=2) + "\n",
    )
    write_text(
        GOLDEN / "snips_sample.json",
        json.dumps(SNIPS_SAMPLE, ensure_ascii=False, indent=2) + "\n",
    )

    write_text(
        FIXTURES / "registry.json",
        json.dumps(REGISTRY, ensure_ascii=False, indent=2) + "\n",
    )
    write_text(FIXTURES / "compact_functions.txt", COMPACT_FUNCTIONS)
    write_jsonl(FIXTURES / "snips.jsonl", SNIPS_RECORDS)
    write_jsonl(FIXTURES / "fc.jsonl", FC_RECORDS)
    write_jsonl(FIXTURES / "seeds.jsonl", SEEDS)
    write_text(
        FIXTURES / "config.json", json.dumps(CONFIG, ensure_ascii=False, indent=2) + "\n"
    )
    write_jsonl(FIXTURES / "eval_records.jsonl", EVAL_RECORDS)

    # Replay entries are keyed by the exact prompts the generator will send.
    from dialokit.generate import build_generation_prompt, seed_from_doc
    from dialokit.model import load_registry

    registry = load_registry(REGISTRY, name="registry.json")
    replies = {"sgd-dev-0001": REPLY_1, "sgd-dev-0002": REPLY_2}
    entries = []
    for doc in SEEDS:
        seed = seed_from_doc(doc)
        entries.append(
            {
                "prompt": build_generation_prompt(seed, registry),
                "reply": replies[seed.id],
            }
        )
    write_jsonl(FIXTURES / "replay.jsonl", entries)
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
