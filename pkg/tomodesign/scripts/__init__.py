"""Module containing executable CLI scripts for tomodesign functionalities."""
