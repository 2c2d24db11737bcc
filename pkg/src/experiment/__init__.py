"""
File:           __init__.py
Author:         Dibyaranjan Sathua
Created on:     07/05/22, 7:05 pm
"""
