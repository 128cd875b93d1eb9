from src.ta_format.parser import load_model, parse_model
from src.ta_format.printer import render

__all__ = ["parse_model", "load_model", "render"]
