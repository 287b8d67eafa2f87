#include "entikit/prompts.hpp"

namespace entikit::prompts {

const std::string_view kEntityExtractionSystem =
    R"PROMPT(As a knowledge analyzer, your task is to dissect and understand an
article provided by the user. You are required to perform the
following steps:
1. Summarize the Article: Provide a concise summary of the entire
article, capturing the main points and themes.
2. Extract Entities: Identify and list all significant "nouns" or
entities mentioned within the article. These entities should include
but not limited to:
    * People: Any individuals mentioned in the article, using the
    names or references provided.
    * Places: Both specific locations and abstract spaces relevant to
    the content.
    * Object: Any concrete object that is referenced by the provided
    content.
    * Concepts: Any significant abstract ideas or themes that are
    central to the article's discussion.

Try to exhaust as many entities as possible. Your response should be 
structured in a JSON format to organize the information effectively.
Ensure that the summary is brief yet comprehensive, and the list of
entities is detailed and accurate.

Here is the format you should use for your response:

{
  "summary":  "<A concise summary of the article>",
  "entities": ["entity1", "entity2", ...]
})PROMPT";

const std::string_view kRelationPairSystem =
    R"PROMPT(You will act as a knowledge analyzer tasked with dissecting an
article provided by the user. Your role involves two main 
objectives:
1. Rephrasing Content: The user will identify two specific entities
   mentioned in the article. You are required to rephrase the
   content of the article twice:
    * Once, emphasizing the first entity.
    * Again, emphasizing the second entity.
2. Analyzing Interactions: Discuss how the two specified entities
   interact within the context of the article.

Your responses should provide clear segregation between the
rephrased content and the interaction analysis. Ensure each section
of the output include sufficient context, ideally referencing the
article's title to maintain clarity about the discussion's focus.
Here is the format you should follow for your response:

### Discussion of <title> in relation to <entity1>
<Rephrased content focusing on the first entity>

### Discussion of <title> in relation to <entity2>
<Rephrased content focusing on the second entity>

### Discussion of Interaction between <entity1> and <entity2> 
    in context of <title>
<Discussion on how the two entities interact within the article>)PROMPT";

const std::string_view kRelationTripletSystem =
    R"PROMPT(You will act as a knowledge analyzer tasked with dissecting an
article provided by the user. Your role involves three main
objectives:

1. Rephrasing Content: The user will identify three specific
   entities mentioned in the article. You are required to rephrase
   the content of the article three times:
    * Once, emphasizing the first entity.
    * Again, emphasizing the second entity.
    * Lastly, emphasizing the third entity.
2. Analyzing Interactions: Discuss how these three specified
   entities interact within the context of the article.

Your responses should provide clear segregation between the
rephrased content and the interaction analysis. Ensure each section
of the output include sufficient context, ideally referencing the
article's title to maintain clarity about the discussion's focus.
Here is the format you should follow for your response:

### Discussion of <title> in relation to <entity1>
<Rephrased content focusing on the first entity>

### Discussion of <title> in relation to <entity2>
<Rephrased content focusing on the second entity>

### Discussion of <title> in relation to <entity3>
<Rephrased content focusing on the third entity>

### Discussion of Interaction between <entity1>, <entity2> and
    <entity3> in context of <title>
<Discussion on how the three entities interact within the article>)PROMPT";

const std::string_view kRephraseEasySystem =
    R"PROMPT(You are an assistant to help read a article and then rephrase it in
simpler terms. The user will provide you with an article with
title, year, content. You need to generate a paraphrase of the same
article using a very small vocabulary and extremely simple 
sentences that a toddler will understand. Remember to keep the
meaning and every content of the article intact, including the
title, year, etc.)PROMPT";

const std::string_view kRephraseMediumSystem =
    R"PROMPT(You are an assistant to help read a article and then rephrase it in
different terms. The user will provide you with an article with
title, year, content. You need to generate a paraphrase of the same
article using diverse and high quality English language as in 
sentences on Wikipedia. Remember to keep the meaning and every
content of the article intact, including the title, year,
etc.)PROMPT";

const std::string_view kRephraseHardSystem =
    R"PROMPT(You are an assistant to help read a article and then rephrase it in
more sophisticated terms. The user will provide you with an article
with title, year, content. You need to generate a paraphrase of the
same article using very terse and abstruse language that only an
erudite scholar will understand. Remember to keep the meaning and
every content of the article intact, including the title, year,
etc.)PROMPT";

const std::string_view kQaSftSystem =
    R"PROMPT(You are an assistant to help read a article and then rephrase it in a
question answering format. The user will provide you with an article
with title, year, content. You need to generate a paraphrase of the
same article in question and answer format with multiple tags of
"Question: ..." followed by "Answer: ...". Remember to keep the
meaning and every content of the article intact, including the title,
year, etc.)PROMPT";

const std::string_view kQaFiveShot =
    R"PROMPT(## Example 1
### Question
In the context of "Les Misérables", written by Victor Hugo in 1862,
what is the main setting of the novel? There is only one correct
choice.
### Choices
A. London
B. Madrid
C. Paris
D. Rome
### Thought Process and Answer
Thought process: "Les Misérables" is primarily set in Paris, making
C the correct choice. London, Madrid, and Rome are significant
cities in other literary works but not in Victor Hugo's "Les
Misérables". There is only one correct choice.
Answer: C.

## Example 2
### Question
In the context of "Brave New World", written by Aldous Huxley in
1932, what substance is widely used in the society to control
citizens' happiness? There is only one correct choice.
### Choices
A. Gold
B. Soma
C. Silver
D. Iron
### Thought Process and Answer
Thought process: In Aldous Huxley's "Brave New World," Soma is used
as a means to maintain social control by ensuring citizens'
happiness, making B the correct choice. Gold, Silver, and Iron are
not the substances used for this purpose in the book.
Answer: B.

## Example 3
### Question
In the context of "Romeo and Juliet", written by William
Shakespeare in the early 1590s, what are the names of the two
feuding families? There is only one correct choice.
Choices:
A. Montague and Capulet
B. Bennet and Darcy
C. Linton and Earnshaw
D. Bloom and Dedalus
### Thought Process and Answer
Thought process: In William Shakespeare's "Romeo and Juliet," the
two feuding families are the Montagues and the Capulets, making A
the correct choice. The Bennets and Darcys are in "Pride and
Prejudice", the Lintons and Earnshaws in "Wuthering Heights", and
Bloom and Dedalus in "Ulysses".
Answer: A.

## Example 4
### Question
In the context of "1984", written by George Orwell in 1949, what is 
the name of the totalitarian leader? There is only one correct
choice.
### Choices
A. Big Brother
B. O'Brien
C. Winston Smith
D. Emmanuel Goldstein
### Thought Process and Answer
Thought process: In George Orwell's "1984," the totalitarian leader
is known as Big Brother, making A the correct choice. O'Brien is a
character in the novel, Winston Smith is the protagonist, and
Emmanuel Goldstein is a rebel leader.
Answer: A.

## Example 5
### Question
In the context of "Moby-Dick", written by Herman Melville in 1851,
what is the name of the ship's captain obsessed with hunting the
titular whale? There is only one correct choice.
### Choices
A. Captain Hook
B. Captain Nemo
C. Captain Flint
D. Captain Ahab
### Thought Process and Answer
Thought process: In Herman Melville's "Moby-Dick," the ship's
captain obsessed with hunting the whale is Captain Ahab, making D
the correct choice. Captain Nemo is in "Twenty Thousand Leagues
Under the Sea", Captain Flint in "Treasure Island", and Captain
Hook in "Peter Pan".
Answer: D.

## Example 6
)PROMPT";

const std::string_view kClaimSplitSystem =
    R"PROMPT(You are an evaluation assistant. Split the summary provided by the user
into a list of atomic claims. Each claim must be a single, self-contained
factual statement about the work being summarized. Respond with a JSON
array of strings and nothing else.)PROMPT";

const std::string_view kClaimJudgeSystem =
    R"PROMPT(You are an evaluation assistant. The user provides a source article and a
numbered list of claims about it. For each claim, decide whether it is true
or false based solely on the source article. For each true claim, further
decide whether it is salient (it contributes to the article's main message)
or cosmetic (a factual detail that does not help understand the main
message). Respond with a JSON array with one object per claim, in order,
each of the form
{"claim": "<claim text>", "truth": "true" | "false", "salience": "salient" | "cosmetic" | "n/a"}.
Use "n/a" for salience if and only if the claim is false. Respond with the
JSON array and nothing else.)PROMPT";

const std::string_view kJsonRetrySuffix =
    "\n\nYour previous reply could not be parsed. Respond with exactly the "
    "requested JSON and no surrounding text.";

std::string entity_extraction_user(std::string_view document_text) {
  std::string out = "* Document ";
  out += document_text;
  return out;
}

std::string relation_user(std::string_view document_text,
                          std::span<const std::string> entities) {
  std::string out = "* Document ";
  out += document_text;
  out += "\n* Entities ";
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (i) out += ", ";
    out += entities[i];
  }
  return out;
}

std::string article_user(std::string_view title, int year,
                         std::string_view content) {
  std::string out = "Title: ";
  out += title;
  out += "\nYear: ";
  out += std::to_string(year);
  out += "\nContent: ";
  out += content;
  return out;
}

std::string summary_prompt_short(std::string_view title, std::string_view author) {
  std::string out = "Summarize the article ";
  out += title;
  out += " by ";
  out += author;
  out += " for me.";
  return out;
}

std::string summary_prompt_long(std::string_view title, std::string_view author) {
  std::string out = "Write an extremely long and detailed article regarding the book ";
  out += title;
  out += " by ";
  out += author;
  out += ".";
  return out;
}

}  // namespace entikit::prompts
