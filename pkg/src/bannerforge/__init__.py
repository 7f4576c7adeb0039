"""bannerforge: offline banner-creative generation and CTR ranking."""

__version__ = "0.1.0"
