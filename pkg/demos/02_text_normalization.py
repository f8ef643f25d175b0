"""Text prep: the deterministic cleaning pipeline and tokenizers.

Order matters: URLs go first (they are full of digits and punctuation),
then mentions, digits, special characters (replaced by spaces), and
finally simple case folding.  The rules are script-agnostic, so German
and Urdu text survive unharmed.
"""

from altc import PrepConfig, normalize, tokenize

samples = [
    "Check @user https://t.co/x THIS 123!",
    "RT @hope_fan: What a day!!! 100% #blessed www.example.com/x?q=1",
    "Die Straße wird besser — GROSSE Hoffnung!",
    "امید ہے کہ کل بہتر ہوگا! 123",
]

cfg = PrepConfig()
for raw in samples:
    clean = normalize(raw, cfg)
    print(f"raw:    {raw}")
    print(f"clean:  {clean}")
    print(f"tokens: {tokenize(clean, cfg)}")
    print()

# Every switch can be turned off independently.
keep_case = PrepConfig(lowercase=False)
print("case kept:   ", normalize("Keep MY Case", keep_case))

keep_digits = PrepConfig(strip_digits=False, strip_special=False)
print("digits kept: ", normalize("route 66!", keep_digits))

ws = PrepConfig(tokenizer="whitespace")
print("whitespace:  ", tokenize("check this out", ws))

# normalize is idempotent: cleaning twice changes nothing.
once = normalize(samples[1], cfg)
assert normalize(once, cfg) == once
print("\nidempotent: normalize(normalize(x)) == normalize(x)")
