"""outfitgen: prompting-strategy pipelines for outfit descriptions and images.

Turns (style, occasion, wearer type) triplets into rendered prompts, generated
descriptions and images via pluggable backends, and evaluates the results with
cosine alignment scores and a survey statistics harness.
"""

__version__ = "0.1.0"
