"""Frozen instruction and prompt text blocks.

These strings are emitted verbatim into training samples and generation
prompts; golden tests pin them byte-for-byte, so edit with care. Block
delimiters follow the [BEGIN OF X] / [END OF X] convention throughout.
"""

from __future__ import annotations

DST_INSTRUCTION = """You are a helpful assistant who is assigned to find the intents shown by the user on 7 domains - GetWeather, AddToPlaylist, SearchScreeningEvent, BookRestaurant, SearchCreativeWork, RateBook, PlayMusic.

The user can seek for BookRestaurant by slots - poi, restaurant_type, served_dish, timeRange, party_size_number, restaurant_name, state, country, party_size_description, sort, city, spatial_relation, cuisine, facility.
The user can seek for GetWeather by slots - condition_temperature, geographic_poi, current_location, timeRange, condition_description, state, country, city, spatial_relation.
The user can seek for SearchCreativeWork by slots - object_type, object_name.
The user can seek for PlayMusic by slots - track, playlist, service, genre, year, album, music_item, sort, artist.
The user can seek for SearchScreeningEvent by slots - movie_name, location_name, timeRange, object_type, movie_type, object_location_type, spatial_relation.
The user can seek for RateBook by slots - rating_value, rating_unit, object_type, object_select, object_part_of_series_type, best_rating, object_name.
Do not capture any other slots!

# Task
You will be provided with an user utterance. You must find all the user intents and output them in JSON format.

# Sample Output
{"domain": "AddToPlaylist", "slot_values": {"music_item": "abc", "artist": "xyz"}}"""


FC_TASK_INSTRUCTION = """[BEGIN OF TASK INSTRUCTION]
You are a tool calling assistant. In order to complete the user's request, you need to select one or more appropriate tools from the following tools and fill in the correct values for the tool parameters. Your specific tasks are:
1. Make one or more function/tool calls to meet the request based on the question.
2. If none of the function can be used, point it out and refuse to answer.
3. If the given question lacks the parameters required by the function, also point it out.
[END OF TASK INSTRUCTION]"""


FC_FORMAT_INSTRUCTION = """[BEGIN OF FORMAT INSTRUCTION]
The output MUST strictly adhere to the following JSON format, and NO other text MUST be included.
The example format is as follows. Please make sure the parameter type is correct. If no function call is needed, please directly output an empty list '[]'
[
{"name": "func_name1", "arguments": {"argument1": "value1", "argument2": "value2"}},
... (more tool calls as required)
]
[END OF FORMAT INSTRUCTION]"""


ACTION_TASK_INSTRUCTION = """[BEGIN OF TASK INSTRUCTION]
You are a helpful conversational assistant who can perform API function calling.
Your goal is to understand user queries and respond using the appropriate API functions.
In order to complete the user's request, you need to select a tool from the following functions and fill in the correct values for the function parameters.
Your specific tasks are:
1. Analyze the user’s query within the given dialogue context to identify their intent and relevant details.
2. Make a function/tool call and provide the necessary arguments to meet the request based on the user query.
3. Formulate a natural and coherent response, guiding the conversation towards resolving the user’s request.
[END OF TASK INSTRUCTION]"""


RESPONSE_TASK_INSTRUCTION = """[BEGIN OF TASK INSTRUCTION]
You are a helpful conversational assistant specializing in understanding user queries and providing accurate, reasoned responses.
Your goal is to analyze the user's input, reason about their intent and needs, and provide a coherent and contextually appropriate system response.
Your specific tasks are:
- Ensure your response is informative and contextually relevant, guiding the conversation toward successful task completion.
- Analyze the user's input in the context of the conversation history (if available) to identify their intent and relevant details.
- Use logical reasoning to determine the most suitable response, considering the user's needs and the dialogue context.
- Generate a natural and coherent system response to address the user’s request or query effectively.
[END OF TASK INSTRUCTION]"""


TRACE_FORMAT_INSTRUCTION = """[BEGIN OF FORMAT INSTRUCTION]
The output MUST strictly adhere to the following structured text format.
Example Output API Call Format:
function_name(argument1=value1, argument2=value2, ...)
[END OF FORMAT INSTRUCTION]"""


GENERATION_ROLE = """You are an advanced AI assistant specializing in conversational dialogues.
You have access to a variety of services and APIs to assist users with their requests and your goal is to provide helpful and informative responses to user queries and commands.
You can interact with multiple services and APIs to fulfill user requests.
Your responses should be natural, informative, and tailored to the user's needs."""


# "Avaliable" below reproduces the published wording; replay files key on the
# exact prompt bytes, so the spelling must stay stable.
GENERATION_TASK_INFORMATION = """# Task Information:
- You are asked to create a dataset in the format: User - Thought1 - API - API Input Arguments - API Result - Thought2 - System, or User - Thought - System.
- For the given # User Input, generate a multi-turn dialogue that follows this format, with each turn exhibiting realistic context reasoning, thought processes, and API interaction where applicable.
- The dialogues should be converted to follow a specific # Output Format, which includes reasoning on whether an API call is needed or if the system can respond directly.
- If the system decides that an API call is necessary, use this format: User - Thought1 - API - API Input Arguments - API Result - Thought2 - System.
- Call the right API from # Avaliable Functions and provide the necessary input arguments to fulfill the user's request.
- If you think a function argument is not necessary, you can skip it. Don't provide unnecessary arguments and None values.
- Ensure that the API calls are used logically and that the dialogue remains coherent and natural throughout the exchange.
- If the system determines that an API call is not necessary, use this format: User - Thought - System.
- Include intermediate thoughts where appropriate to capture the model's internal reasoning, and clearly separate the different components of the format."""


GENERATION_OUTPUT_FORMAT = """# Output Format:
- If an API Call is Needed:
    User: [User Input]
    Thought1: [I need to call an API]
    API Name: [API Call Name: CheckBalance(), TransferMoney(),...,  FindAttractions(), GetWeather()]
    API Input: [The input parameters for the API]
    API Result: [API output result]
    Thought2: [2nd thought after API Result that ensure if the information is enough before the system response]
    System: [Your system response here]

- If an API Call is Not Needed:
    User: [User Input]
    Thought: [I don't need an API and I want to respond to the user]
    System: [Your system response here]"""


GENERATION_EXAMPLE = """# Example:
User: Add Don and Sherri to my "Meditate to Sounds of Nature" playlist.
Thought1: The user wants to add two artists to a specific playlist. I'll need to extract the playlist name and the artists' names.
API Name: AddToPlaylist
API Input: {'playlist_name': 'Meditate to Sounds of Nature', 'artists': Don Sherri}
API Result: {'status': 'success', 'message': 'Don and Sherri have been added to your playlist.'}
Thought2: The API call was successful, and the artists were added to the playlist. I need to inform the user about this.
System: Don and Sherri have been successfully added to your "Meditate to Sounds of Nature" playlist. Enjoy your music!

User: Thank you for adding them. I think I can add more songs to the playlist.
Thought: I don't need an API call for that, I want to respond to the user.
System: Would you like to add more songs?

User: Yes, please add "Calm River" to the playlist.
Thought1: The user wants to add another song to the playlist. I'll note the song title and proceed with the request.
API Name: AddToPlaylist
API Input: {'playlist_name': 'Meditate to Sounds of Nature', 'songs': Calm River}
API Result: {'status': 'success', 'message': 'Calm River has been added to your playlist.'}
Thought2: The song was successfully added. I should let the user know.
System: "Calm River" has been successfully added to your "Meditate to Sounds of Nature" playlist. Would you like to do anything else?

User: No, that's all for now. Thank you!
Thought: The user is satisfied and doesn't need further assistance. I should acknowledge their gratitude.
System: You're welcome! If you need anything else, feel free to ask. Enjoy your relaxing music!"""


CORRECTIVE_RETRY_LINE = (
    "Your previous reply did not follow the required format. "
    "Re-emit the full dialogue, strictly following the # Output Format above: "
    "each turn is either User / Thought1 / API Name / API Input / API Result / "
    "Thought2 / System, or User / Thought / System, one labeled block per line."
)
