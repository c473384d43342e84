"""
Text preprocessing for Arabic-heavy social media posts
======================================================

Walks the cleaning chain one stage at a time: noise stripping,
orthographic normalization, tokenization, stopword removal, light
stemming, and n-gram expansion.
"""

from trendpulse.textprep import (
    default_stopwords,
    normalize,
    remove_stopwords,
    sentiment_tokens,
    stem,
    strip_noise,
    tokenize,
    topic_stream,
)

## Stage 1: strip URLs, mentions, and emoji before anything touches letters
raw = "قمة المناخ في الرياض رائعة 🌍🔥 @news_channel https://t.co/xyz  #قمة_المناخ"
print("raw      :", raw)
print("stripped :", strip_noise(raw))

## Stage 2: orthographic normalization
# Alef variants fold to bare alef, final ya/ta-marbuta are unified, and
# diacritics plus tatweel disappear; Latin text is lowercased. Running it
# twice changes nothing, which the pipeline relies on.
decorated = "اَلـــسَّيَّارَةُ الجَمِيلَةُ في المَدِينَةِ القَدِيمَةِ"
once = normalize(decorated)
print("\nnormalized    :", once)
print("idempotent    :", normalize(once) == once)
print("alef variants :", normalize("أحمد إبراهيم آمال"), "| latin:", normalize("TRENDING Now"))

## Stage 3: tokenization splits on whitespace and punctuation
sentence = normalize(strip_noise("عاجل: افتتاح مشروع الطاقة الشمسية، بحضور رسمي!"))
tokens = tokenize(sentence)
print("\ntokens:", tokens)

## Stage 4: stopword removal, then one-prefix one-suffix stemming
content = remove_stopwords(tokens, default_stopwords())
print("content words :", content)
print("stemmed       :", stem(content))
print("examples      :", stem(["والسيارات", "المدينة", "الرياض", "solar"]))

## Stage 5: the two consumer chains
# Topic modeling wants stopwords gone and n-grams added; sentiment wants
# every token kept so negators like "لا" survive to flip polarity.
text = "لا أحب الازدحام المروري في المدينة القديمة"
stream = topic_stream(text, ngram_orders=(2,))
print("\ntopic unigrams   :", stream.unigrams)
print("topic bigrams    :", stream.ngrams)
print("sentiment tokens :", sentiment_tokens(text))
