"""Emotion-driven museum visit orchestration.

Core pieces: the emotion/painting catalog, the event-sourced visitor
session machine, affective-slider self-reports, interview video
selection, facial-action-unit affect scoring, souvenir postcards,
consent-gated persistence, and deployment aggregates.
"""

__version__ = "0.1.0"
