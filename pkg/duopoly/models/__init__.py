# Pydantic models for the game, its dynamics and run results
